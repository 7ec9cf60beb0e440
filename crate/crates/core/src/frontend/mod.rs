//! C-subset front end: lexing, parsing, canonical loop discovery and unparsing.

pub mod ast;
pub mod lexer;
pub mod liveness;
pub mod loops;
pub mod parser;
pub mod span;
pub mod unparse;

pub use ast::{AssignOp, BinOp, CType, Dim, Node, NodeKind, UnOp};
pub use lexer::{tokenize, LexError, Token, TokenKind};
pub use loops::{locate_loops, CanonicalLoop, Comparison, IterSpace, LoopScan, SkipReason, SkipRecord};
pub use parser::parse;
pub use span::SourceSpan;
pub use unparse::{unparse, unparse_expr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrontendError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("parse error at line {}: expected {expected}, found {found}", span.line)]
    Parse {
        span: SourceSpan,
        expected: String,
        found: String,
    },
    #[error("unresolved name `{name}` at line {}", span.line)]
    UnresolvedName { span: SourceSpan, name: String },
    #[error("line {}: {message}", span.line)]
    Semantic { span: SourceSpan, message: String },
}

impl FrontendError {
    pub fn span(&self) -> SourceSpan {
        match self {
            FrontendError::Lex(e) => e.span,
            FrontendError::Parse { span, .. }
            | FrontendError::UnresolvedName { span, .. }
            | FrontendError::Semantic { span, .. } => *span,
        }
    }
}

/// A parsed source file with its lossless token stream.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub text: String,
    pub tokens: Vec<Token>,
    pub ast: Node,
}

impl SourceFile {
    pub fn parse(text: &str) -> Result<SourceFile, FrontendError> {
        let tokens = tokenize(text)?;
        let ast = parse(&tokens)?;
        Ok(SourceFile {
            text: text.to_string(),
            tokens,
            ast,
        })
    }

    /// The `#pragma omp` line directly preceding `span`, skipping only
    /// whitespace, comments and other directives.
    pub fn omp_pragma_before(&self, span: SourceSpan) -> Option<SourceSpan> {
        let idx = self
            .tokens
            .iter()
            .position(|t| t.span.start_byte == span.start_byte && !t.kind.is_trivia())?;
        for tok in self.tokens[..idx].iter().rev() {
            match tok.kind {
                TokenKind::Whitespace | TokenKind::LineComment | TokenKind::BlockComment => {}
                TokenKind::Directive => {
                    if is_omp_pragma(tok.span.text(&self.text)) {
                        return Some(tok.span);
                    }
                }
                _ => return None,
            }
        }
        None
    }
}

/// Whether a directive line is `#pragma omp ...`.
pub fn is_omp_pragma(line: &str) -> bool {
    let rest = line.trim_start();
    let Some(rest) = rest.strip_prefix('#') else {
        return false;
    };
    let mut words = rest.split_whitespace();
    words.next() == Some("pragma") && words.next() == Some("omp")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_existing_pragma() {
        let src = "void f(int n, double a[]) {\n    int i;\n    #pragma omp parallel for\n    for (i = 0; i < n; i++) a[i] = 0.0;\n    for (i = 0; i < n; i++) a[i] = 1.0;\n}\n";
        let file = SourceFile::parse(src).unwrap();
        let scan = locate_loops(&file.ast);
        assert!(file.omp_pragma_before(scan.loops[0].span).is_some());
        assert!(file.omp_pragma_before(scan.loops[1].span).is_none());
    }

    #[test]
    fn pragma_word_matching() {
        assert!(is_omp_pragma("  # pragma   omp simd"));
        assert!(!is_omp_pragma("#pragma once"));
        assert!(!is_omp_pragma("#include <omp.h>"));
    }
}
