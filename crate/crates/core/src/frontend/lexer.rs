//! Full-fidelity lexer for the C subset.
//!
//! The token stream keeps whitespace, comments and preprocessor lines as
//! trivia tokens, so concatenating every token's text reproduces the input.

use serde::Serialize;
use std::fmt;

use super::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TokenKind {
    // trivia
    Whitespace,
    LineComment,
    BlockComment,
    /// A whole `#...` line (pragmas, includes). Opaque to the parser.
    Directive,

    Ident(String),
    Keyword(Keyword),
    Int(i64),
    /// Keeps the source spelling so unparse reproduces it exactly.
    Float(String),
    Str(String),

    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Semi,
    Comma,

    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Assign,
    PlusEq,
    MinusEq,
    StarEq,
    SlashEq,
    PlusPlus,
    MinusMinus,

    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    NotEq,
    AndAnd,
    OrOr,
    Bang,

    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Keyword {
    Int,
    Long,
    Float,
    Double,
    Void,
    For,
    While,
    If,
    Else,
    Return,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Keyword> {
        Some(match s {
            "int" => Keyword::Int,
            "long" => Keyword::Long,
            "float" => Keyword::Float,
            "double" => Keyword::Double,
            "void" => Keyword::Void,
            "for" => Keyword::For,
            "while" => Keyword::While,
            "if" => Keyword::If,
            "else" => Keyword::Else,
            "return" => Keyword::Return,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Int => "int",
            Keyword::Long => "long",
            Keyword::Float => "float",
            Keyword::Double => "double",
            Keyword::Void => "void",
            Keyword::For => "for",
            Keyword::While => "while",
            Keyword::If => "if",
            Keyword::Else => "else",
            Keyword::Return => "return",
        }
    }
}

impl TokenKind {
    pub fn is_trivia(&self) -> bool {
        matches!(
            self,
            TokenKind::Whitespace | TokenKind::LineComment | TokenKind::BlockComment | TokenKind::Directive
        )
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Whitespace => "whitespace",
            TokenKind::LineComment | TokenKind::BlockComment => "comment",
            TokenKind::Directive => "directive",
            TokenKind::Ident(name) => return write!(f, "identifier `{name}`"),
            TokenKind::Keyword(k) => return write!(f, "`{}`", k.as_str()),
            TokenKind::Int(v) => return write!(f, "integer `{v}`"),
            TokenKind::Float(v) => return write!(f, "float `{v}`"),
            TokenKind::Str(_) => "string literal",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::LBrace => "`{`",
            TokenKind::RBrace => "`}`",
            TokenKind::LBrack => "`[`",
            TokenKind::RBrack => "`]`",
            TokenKind::Semi => "`;`",
            TokenKind::Comma => "`,`",
            TokenKind::Plus => "`+`",
            TokenKind::Minus => "`-`",
            TokenKind::Star => "`*`",
            TokenKind::Slash => "`/`",
            TokenKind::Percent => "`%`",
            TokenKind::Assign => "`=`",
            TokenKind::PlusEq => "`+=`",
            TokenKind::MinusEq => "`-=`",
            TokenKind::StarEq => "`*=`",
            TokenKind::SlashEq => "`/=`",
            TokenKind::PlusPlus => "`++`",
            TokenKind::MinusMinus => "`--`",
            TokenKind::Lt => "`<`",
            TokenKind::Le => "`<=`",
            TokenKind::Gt => "`>`",
            TokenKind::Ge => "`>=`",
            TokenKind::EqEq => "`==`",
            TokenKind::NotEq => "`!=`",
            TokenKind::AndAnd => "`&&`",
            TokenKind::OrOr => "`||`",
            TokenKind::Bang => "`!`",
            TokenKind::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("lex error at byte {} (line {}): {message}", span.start_byte, span.line)]
pub struct LexError {
    pub span: SourceSpan,
    pub message: String,
}

struct Cursor<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek_at(&self, off: usize) -> Option<u8> {
        self.bytes.get(self.pos + off).copied()
    }

    fn bump(&mut self) {
        if self.bytes[self.pos] == b'\n' {
            self.line += 1;
        }
        self.pos += 1;
    }

    fn bump_while(&mut self, pred: impl Fn(u8) -> bool) {
        while let Some(b) = self.peek() {
            if !pred(b) {
                break;
            }
            self.bump();
        }
    }

    /// True when only spaces/tabs precede `pos` on the current line.
    fn at_line_start(&self) -> bool {
        self.bytes[..self.pos]
            .iter()
            .rev()
            .take_while(|&&b| b != b'\n')
            .all(|&b| b == b' ' || b == b'\t')
    }
}

/// Tokenize `source` into a lossless token stream ending in `Eof`.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        src: source,
        bytes: source.as_bytes(),
        pos: 0,
        line: 1,
    };
    let mut out = Vec::new();

    while let Some(b) = cur.peek() {
        let start = cur.pos;
        let line = cur.line;
        let kind = match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                cur.bump_while(|c| matches!(c, b' ' | b'\t' | b'\r' | b'\n'));
                TokenKind::Whitespace
            }
            b'/' if cur.peek_at(1) == Some(b'/') => {
                cur.bump_while(|c| c != b'\n');
                TokenKind::LineComment
            }
            b'/' if cur.peek_at(1) == Some(b'*') => {
                cur.bump();
                cur.bump();
                loop {
                    match cur.peek() {
                        None => {
                            return Err(LexError {
                                span: SourceSpan::new(start, cur.pos, line),
                                message: "unterminated block comment".into(),
                            })
                        }
                        Some(b'*') if cur.peek_at(1) == Some(b'/') => {
                            cur.bump();
                            cur.bump();
                            break;
                        }
                        Some(_) => cur.bump(),
                    }
                }
                TokenKind::BlockComment
            }
            b'#' if cur.at_line_start() => {
                // directive lines may continue with a trailing backslash
                loop {
                    cur.bump_while(|c| c != b'\n');
                    let body = &cur.bytes[start..cur.pos];
                    let continued = body.iter().rev().find(|&&c| c != b'\r').is_some_and(|&c| c == b'\\');
                    if continued && cur.peek() == Some(b'\n') {
                        cur.bump();
                    } else {
                        break;
                    }
                }
                // keep a trailing '\r' out of the directive text
                if cur.pos > start && cur.bytes[cur.pos - 1] == b'\r' {
                    cur.pos -= 1;
                }
                TokenKind::Directive
            }
            b'"' => {
                cur.bump();
                let mut value = String::new();
                loop {
                    match cur.peek() {
                        None | Some(b'\n') => {
                            return Err(LexError {
                                span: SourceSpan::new(start, cur.pos.max(start + 1), line),
                                message: "unterminated string literal".into(),
                            })
                        }
                        Some(b'"') => {
                            cur.bump();
                            break;
                        }
                        Some(b'\\') => {
                            cur.bump();
                            if cur.peek().is_some() {
                                cur.bump();
                            }
                        }
                        Some(_) => cur.bump(),
                    }
                }
                value.push_str(&cur.src[start + 1..cur.pos - 1]);
                TokenKind::Str(value)
            }
            b'0'..=b'9' | b'.' if b != b'.' || cur.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => {
                lex_number(&mut cur)?
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                cur.bump_while(|c| c.is_ascii_alphanumeric() || c == b'_');
                let text = &cur.src[start..cur.pos];
                match Keyword::from_ident(text) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(text.to_string()),
                }
            }
            _ => lex_punct(&mut cur).ok_or_else(|| {
                let ch = cur.src[start..].chars().next().unwrap_or('?');
                LexError {
                    span: SourceSpan::new(start, start + ch.len_utf8(), line),
                    message: format!("character `{ch}` is outside the accepted C subset"),
                }
            })?,
        };
        out.push(Token {
            kind,
            span: SourceSpan::new(start, cur.pos, line),
        });
    }

    out.push(Token {
        kind: TokenKind::Eof,
        span: SourceSpan::empty_at(source.len(), cur.line),
    });
    Ok(out)
}

fn lex_number(cur: &mut Cursor<'_>) -> Result<TokenKind, LexError> {
    let start = cur.pos;
    let line = cur.line;
    let mut is_float = false;
    cur.bump_while(|c| c.is_ascii_digit());
    if cur.peek() == Some(b'.') {
        is_float = true;
        cur.bump();
        cur.bump_while(|c| c.is_ascii_digit());
    }
    if matches!(cur.peek(), Some(b'e' | b'E')) {
        let sign = matches!(cur.peek_at(1), Some(b'+' | b'-'));
        let digit_at = if sign { 2 } else { 1 };
        if cur.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            for _ in 0..digit_at {
                cur.bump();
            }
            cur.bump_while(|c| c.is_ascii_digit());
        }
    }
    if is_float && matches!(cur.peek(), Some(b'f' | b'F')) {
        cur.bump();
    }
    if !is_float && matches!(cur.peek(), Some(b'l' | b'L')) {
        cur.bump();
    }
    if cur.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
        return Err(LexError {
            span: SourceSpan::new(start, cur.pos + 1, line),
            message: "malformed numeric literal".into(),
        });
    }
    let text = &cur.src[start..cur.pos];
    if is_float {
        Ok(TokenKind::Float(text.to_string()))
    } else {
        text.trim_end_matches(['l', 'L'])
            .parse::<i64>()
            .map(TokenKind::Int)
            .map_err(|_| LexError {
                span: SourceSpan::new(start, cur.pos, line),
                message: "integer literal out of range".into(),
            })
    }
}

fn lex_punct(cur: &mut Cursor<'_>) -> Option<TokenKind> {
    let two = |cur: &Cursor<'_>, c: u8| cur.peek_at(1) == Some(c);
    let b = cur.peek()?;
    let (kind, len) = match b {
        b'(' => (TokenKind::LParen, 1),
        b')' => (TokenKind::RParen, 1),
        b'{' => (TokenKind::LBrace, 1),
        b'}' => (TokenKind::RBrace, 1),
        b'[' => (TokenKind::LBrack, 1),
        b']' => (TokenKind::RBrack, 1),
        b';' => (TokenKind::Semi, 1),
        b',' => (TokenKind::Comma, 1),
        b'+' if two(cur, b'+') => (TokenKind::PlusPlus, 2),
        b'+' if two(cur, b'=') => (TokenKind::PlusEq, 2),
        b'+' => (TokenKind::Plus, 1),
        b'-' if two(cur, b'-') => (TokenKind::MinusMinus, 2),
        b'-' if two(cur, b'=') => (TokenKind::MinusEq, 2),
        b'-' => (TokenKind::Minus, 1),
        b'*' if two(cur, b'=') => (TokenKind::StarEq, 2),
        b'*' => (TokenKind::Star, 1),
        b'/' if two(cur, b'=') => (TokenKind::SlashEq, 2),
        b'/' => (TokenKind::Slash, 1),
        b'%' => (TokenKind::Percent, 1),
        b'=' if two(cur, b'=') => (TokenKind::EqEq, 2),
        b'=' => (TokenKind::Assign, 1),
        b'<' if two(cur, b'=') => (TokenKind::Le, 2),
        b'<' => (TokenKind::Lt, 1),
        b'>' if two(cur, b'=') => (TokenKind::Ge, 2),
        b'>' => (TokenKind::Gt, 1),
        b'!' if two(cur, b'=') => (TokenKind::NotEq, 2),
        b'!' => (TokenKind::Bang, 1),
        b'&' if two(cur, b'&') => (TokenKind::AndAnd, 2),
        b'|' if two(cur, b'|') => (TokenKind::OrOr, 2),
        _ => return None,
    };
    for _ in 0..len {
        cur.bump();
    }
    Some(kind)
}
