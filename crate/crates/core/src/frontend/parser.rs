//! Recursive-descent parser with single-token lookahead.
//!
//! Name resolution happens during the parse: every variable reference must
//! name a declaration in an enclosing scope, and declarations may not shadow
//! a visible name (analysis is name-based).

use std::collections::HashMap;

use super::ast::{AssignOp, BinOp, CType, Dim, Node, NodeKind, UnOp};
use super::lexer::{Keyword, Token, TokenKind};
use super::span::SourceSpan;
use super::FrontendError;

#[derive(Debug, Clone)]
struct Symbol {
    dims: usize,
}

struct Parser<'t> {
    toks: Vec<&'t Token>,
    pos: usize,
    scopes: Vec<HashMap<String, Symbol>>,
    /// Depth of enclosing call argument lists; bare array names are allowed there.
    in_call_args: usize,
}

/// Parse a token stream (trivia included) into a `TranslationUnit`.
pub fn parse(tokens: &[Token]) -> Result<Node, FrontendError> {
    let toks: Vec<&Token> = tokens.iter().filter(|t| !t.kind.is_trivia()).collect();
    if toks.last().map(|t| &t.kind) != Some(&TokenKind::Eof) {
        return Err(FrontendError::Parse {
            span: SourceSpan::empty_at(0, 1),
            expected: "token stream terminated by end of input".into(),
            found: "unterminated stream".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        scopes: vec![HashMap::new()],
        in_call_args: 0,
    };
    p.translation_unit()
}

fn type_keyword(kind: &TokenKind) -> Option<CType> {
    match kind {
        TokenKind::Keyword(Keyword::Int) => Some(CType::Int),
        TokenKind::Keyword(Keyword::Long) => Some(CType::Long),
        TokenKind::Keyword(Keyword::Float) => Some(CType::Float),
        TokenKind::Keyword(Keyword::Double) => Some(CType::Double),
        TokenKind::Keyword(Keyword::Void) => Some(CType::Void),
        _ => None,
    }
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_kind(&self) -> &'t TokenKind {
        &self.peek().kind
    }

    fn peek_nth(&self, n: usize) -> &'t TokenKind {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].kind
    }

    fn bump(&mut self) -> &'t Token {
        let t = self.peek();
        if t.kind != TokenKind::Eof {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn error<T>(&self, expected: &str) -> Result<T, FrontendError> {
        let t = self.peek();
        Err(FrontendError::Parse {
            span: t.span,
            expected: expected.to_string(),
            found: t.kind.to_string(),
        })
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<&'t Token, FrontendError> {
        if *self.peek_kind() == kind {
            Ok(self.bump())
        } else {
            self.error(what)
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, SourceSpan), FrontendError> {
        match self.peek_kind() {
            TokenKind::Ident(name) => {
                let span = self.bump().span;
                Ok((name.clone(), span))
            }
            _ => self.error("identifier"),
        }
    }

    fn lookup(&self, name: &str) -> Option<&Symbol> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn declare(&mut self, name: &str, dims: usize, span: SourceSpan) -> Result<(), FrontendError> {
        if self.lookup(name).is_some() {
            return Err(FrontendError::Semantic {
                span,
                message: format!("`{name}` is already declared in an enclosing scope"),
            });
        }
        self.scopes
            .last_mut()
            .expect("scope stack is never empty")
            .insert(name.to_string(), Symbol { dims });
        Ok(())
    }

    fn with_scope<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T, FrontendError>) -> Result<T, FrontendError> {
        self.scopes.push(HashMap::new());
        let r = f(self);
        self.scopes.pop();
        r
    }

    // ---- top level -------------------------------------------------------

    fn translation_unit(&mut self) -> Result<Node, FrontendError> {
        let mut items = Vec::new();
        while *self.peek_kind() != TokenKind::Eof {
            let Some(ty) = type_keyword(self.peek_kind()) else {
                return self.error("declaration or function definition");
            };
            if matches!(self.peek_nth(1), TokenKind::Ident(_)) && *self.peek_nth(2) == TokenKind::LParen {
                items.push(self.function_def(ty)?);
            } else {
                items.extend(self.declaration()?);
            }
        }
        let span = match (items.first(), items.last()) {
            (Some(a), Some(b)) => a.span.to(b.span),
            _ => SourceSpan::empty_at(0, 1),
        };
        Ok(Node::new(NodeKind::TranslationUnit, span, items))
    }

    fn function_def(&mut self, ret: CType) -> Result<Node, FrontendError> {
        let start = self.bump().span;
        let (name, _) = self.ident()?;
        self.expect(TokenKind::LParen, "`(`")?;
        self.with_scope(|p| {
            let mut children = Vec::new();
            if *p.peek_kind() == TokenKind::Keyword(Keyword::Void) && *p.peek_nth(1) == TokenKind::RParen {
                p.bump();
            } else if *p.peek_kind() != TokenKind::RParen {
                loop {
                    children.push(p.param()?);
                    if !p.eat(&TokenKind::Comma) {
                        break;
                    }
                }
            }
            p.expect(TokenKind::RParen, "`)`")?;
            if *p.peek_kind() != TokenKind::LBrace {
                return p.error("`{` (function prototypes are not supported)");
            }
            // parameters and body locals share one scope, as in C
            let body = p.block_in_current_scope()?;
            let span = start.to(body.span);
            children.push(body);
            Ok(Node::new(NodeKind::FunctionDef { ret, name }, span, children))
        })
    }

    fn param(&mut self) -> Result<Node, FrontendError> {
        let Some(ty) = type_keyword(self.peek_kind()) else {
            return self.error("parameter type");
        };
        if ty == CType::Void {
            return self.error("parameter type other than `void`");
        }
        let start = self.bump().span;
        let (name, name_span) = self.ident()?;
        let mut dims = Vec::new();
        while self.eat(&TokenKind::LBrack) {
            if self.eat(&TokenKind::RBrack) {
                dims.push(Dim::Unsized);
                continue;
            }
            dims.push(self.dim()?);
            self.expect(TokenKind::RBrack, "`]`")?;
        }
        if dims.len() > 2 {
            return Err(FrontendError::Semantic {
                span: name_span,
                message: "arrays of more than two dimensions are not supported".into(),
            });
        }
        self.declare(&name, dims.len(), name_span)?;
        Ok(Node::leaf(
            NodeKind::VarDecl { ty, name, dims },
            start.to(self.prev_span()),
        ))
    }

    fn dim(&mut self) -> Result<Dim, FrontendError> {
        match self.peek_kind().clone() {
            TokenKind::Int(v) if v > 0 => {
                self.bump();
                Ok(Dim::Const(v))
            }
            TokenKind::Ident(name) => {
                let span = self.bump().span;
                match self.lookup(&name) {
                    Some(sym) if sym.dims == 0 => Ok(Dim::Named(name)),
                    Some(_) => Err(FrontendError::Semantic {
                        span,
                        message: format!("array `{name}` used as a dimension"),
                    }),
                    None => Err(FrontendError::UnresolvedName { span, name }),
                }
            }
            _ => self.error("positive integer constant or parameter name as array dimension"),
        }
    }

    /// `type declarator (, declarator)* ;` yielding one VarDecl per declarator.
    fn declaration(&mut self) -> Result<Vec<Node>, FrontendError> {
        let Some(ty) = type_keyword(self.peek_kind()) else {
            return self.error("type");
        };
        if ty == CType::Void {
            return self.error("variable type other than `void`");
        }
        let mut start = self.bump().span;
        let mut decls = Vec::new();
        loop {
            decls.push(self.declarator(ty, start)?);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
            start = self.peek().span;
        }
        self.expect(TokenKind::Semi, "`;` after declaration")?;
        Ok(decls)
    }

    fn declarator(&mut self, ty: CType, start: SourceSpan) -> Result<Node, FrontendError> {
        let (name, name_span) = self.ident()?;
        let mut dims = Vec::new();
        while self.eat(&TokenKind::LBrack) {
            dims.push(self.dim()?);
            self.expect(TokenKind::RBrack, "`]`")?;
        }
        if dims.len() > 2 {
            return Err(FrontendError::Semantic {
                span: name_span,
                message: "arrays of more than two dimensions are not supported".into(),
            });
        }
        let mut children = Vec::new();
        if self.eat(&TokenKind::Assign) {
            if !dims.is_empty() {
                return Err(FrontendError::Semantic {
                    span: name_span,
                    message: "array initializers are not supported".into(),
                });
            }
            children.push(self.expr()?);
        }
        // the name is visible only after its own initializer
        self.declare(&name, dims.len(), name_span)?;
        Ok(Node::new(
            NodeKind::VarDecl { ty, name, dims },
            start.to(self.prev_span()),
            children,
        ))
    }

    // ---- statements ------------------------------------------------------

    fn block(&mut self) -> Result<Node, FrontendError> {
        self.with_scope(|p| p.block_in_current_scope())
    }

    fn block_in_current_scope(&mut self) -> Result<Node, FrontendError> {
        let open = self.expect(TokenKind::LBrace, "`{`")?.span;
        let mut stmts = Vec::new();
        while *self.peek_kind() != TokenKind::RBrace {
            if *self.peek_kind() == TokenKind::Eof {
                return self.error("`}`");
            }
            if type_keyword(self.peek_kind()).is_some() {
                stmts.extend(self.declaration()?);
            } else {
                stmts.push(self.statement()?);
            }
        }
        let close = self.bump().span;
        Ok(Node::new(NodeKind::Block, open.to(close), stmts))
    }

    /// A statement that is not a declaration.
    fn statement(&mut self) -> Result<Node, FrontendError> {
        match self.peek_kind() {
            TokenKind::LBrace => self.block(),
            TokenKind::Semi => {
                let span = self.bump().span;
                Ok(Node::leaf(NodeKind::Block, span))
            }
            TokenKind::Keyword(Keyword::For) => self.for_loop(),
            TokenKind::Keyword(Keyword::While) => {
                let start = self.bump().span;
                self.expect(TokenKind::LParen, "`(`")?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                let body = self.sub_statement()?;
                let span = start.to(body.span);
                Ok(Node::new(NodeKind::WhileLoop, span, vec![cond, body]))
            }
            TokenKind::Keyword(Keyword::If) => {
                let start = self.bump().span;
                self.expect(TokenKind::LParen, "`(`")?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                let then = self.sub_statement()?;
                let mut children = vec![cond, then];
                if self.eat(&TokenKind::Keyword(Keyword::Else)) {
                    children.push(self.sub_statement()?);
                }
                let span = start.to(children.last().expect("nonempty").span);
                Ok(Node::new(NodeKind::If, span, children))
            }
            TokenKind::Keyword(Keyword::Return) => {
                let start = self.bump().span;
                let mut children = Vec::new();
                if *self.peek_kind() != TokenKind::Semi {
                    children.push(self.expr()?);
                }
                let end = self.expect(TokenKind::Semi, "`;`")?.span;
                Ok(Node::new(NodeKind::Return, start.to(end), children))
            }
            TokenKind::Keyword(_) => self.error("statement"),
            _ => {
                let mut stmt = self.simple_statement()?;
                let end = self.expect(TokenKind::Semi, "`;`")?.span;
                stmt.span = stmt.span.to(end);
                Ok(stmt)
            }
        }
    }

    fn sub_statement(&mut self) -> Result<Node, FrontendError> {
        if type_keyword(self.peek_kind()).is_some() {
            return self.error("statement (a declaration needs an enclosing block)");
        }
        self.statement()
    }

    fn for_loop(&mut self) -> Result<Node, FrontendError> {
        let start = self.bump().span;
        self.expect(TokenKind::LParen, "`(`")?;
        self.with_scope(|p| {
            let init = if let Some(ty) = type_keyword(p.peek_kind()) {
                if ty == CType::Void {
                    return p.error("loop variable type");
                }
                let decl_start = p.bump().span;
                let decl = p.declarator(ty, decl_start)?;
                if decl.children.is_empty() {
                    return p.error("initializer in `for` declaration");
                }
                decl
            } else {
                p.simple_statement()?
            };
            p.expect(TokenKind::Semi, "`;` after loop initializer")?;
            let cond = p.expr()?;
            p.expect(TokenKind::Semi, "`;` after loop condition")?;
            let step = p.simple_statement()?;
            p.expect(TokenKind::RParen, "`)`")?;
            let body = p.sub_statement()?;
            let span = start.to(body.span);
            Ok(Node::new(NodeKind::ForLoop, span, vec![init, cond, step, body]))
        })
    }

    /// Assignment, compound assignment, increment/decrement or call, without `;`.
    fn simple_statement(&mut self) -> Result<Node, FrontendError> {
        // prefix ++x / --x
        if matches!(self.peek_kind(), TokenKind::PlusPlus | TokenKind::MinusMinus) {
            let op_tok = self.bump();
            let op = if op_tok.kind == TokenKind::PlusPlus {
                AssignOp::Inc
            } else {
                AssignOp::Dec
            };
            let target = self.lvalue()?;
            let span = op_tok.span.to(target.span);
            return Ok(Node::new(NodeKind::CompoundAssign(op), span, vec![target]));
        }
        if matches!(self.peek_kind(), TokenKind::Ident(_)) && *self.peek_nth(1) == TokenKind::LParen {
            return self.call();
        }
        let target = self.lvalue()?;
        let op = match self.peek_kind() {
            TokenKind::Assign => None,
            TokenKind::PlusEq => Some(AssignOp::Add),
            TokenKind::MinusEq => Some(AssignOp::Sub),
            TokenKind::StarEq => Some(AssignOp::Mul),
            TokenKind::SlashEq => Some(AssignOp::Div),
            TokenKind::PlusPlus => {
                let end = self.bump().span;
                let span = target.span.to(end);
                return Ok(Node::new(NodeKind::CompoundAssign(AssignOp::Inc), span, vec![target]));
            }
            TokenKind::MinusMinus => {
                let end = self.bump().span;
                let span = target.span.to(end);
                return Ok(Node::new(NodeKind::CompoundAssign(AssignOp::Dec), span, vec![target]));
            }
            _ => return self.error("assignment operator"),
        };
        self.bump();
        let value = self.expr()?;
        let span = target.span.to(value.span);
        let kind = match op {
            None => NodeKind::Assign,
            Some(op) => NodeKind::CompoundAssign(op),
        };
        Ok(Node::new(kind, span, vec![target, value]))
    }

    fn lvalue(&mut self) -> Result<Node, FrontendError> {
        if !matches!(self.peek_kind(), TokenKind::Ident(_)) {
            return self.error("assignable variable or array element");
        }
        let node = self.name_expr(false)?;
        if matches!(node.kind, NodeKind::Call { .. }) {
            return Err(FrontendError::Semantic {
                span: node.span,
                message: "a call is not assignable".into(),
            });
        }
        Ok(node)
    }

    fn call(&mut self) -> Result<Node, FrontendError> {
        let (callee, start) = self.ident()?;
        self.expect(TokenKind::LParen, "`(`")?;
        let mut args = Vec::new();
        self.in_call_args += 1;
        let res: Result<(), FrontendError> = (|| {
            if *self.peek_kind() != TokenKind::RParen {
                loop {
                    args.push(self.expr()?);
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
            }
            Ok(())
        })();
        self.in_call_args -= 1;
        res?;
        let end = self.expect(TokenKind::RParen, "`)`")?.span;
        Ok(Node::new(NodeKind::Call { callee }, start.to(end), args))
    }

    // ---- expressions -----------------------------------------------------

    pub(crate) fn expr(&mut self) -> Result<Node, FrontendError> {
        self.binary(1)
    }

    fn binary_op(kind: &TokenKind) -> Option<BinOp> {
        Some(match kind {
            TokenKind::Plus => BinOp::Add,
            TokenKind::Minus => BinOp::Sub,
            TokenKind::Star => BinOp::Mul,
            TokenKind::Slash => BinOp::Div,
            TokenKind::Percent => BinOp::Rem,
            TokenKind::Lt => BinOp::Lt,
            TokenKind::Le => BinOp::Le,
            TokenKind::Gt => BinOp::Gt,
            TokenKind::Ge => BinOp::Ge,
            TokenKind::EqEq => BinOp::Eq,
            TokenKind::NotEq => BinOp::Ne,
            TokenKind::AndAnd => BinOp::And,
            TokenKind::OrOr => BinOp::Or,
            _ => return None,
        })
    }

    /// Precedence climbing; all binary operators are left-associative.
    fn binary(&mut self, min_prec: u8) -> Result<Node, FrontendError> {
        let mut lhs = self.unary()?;
        while let Some(op) = Self::binary_op(self.peek_kind()) {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Node::new(NodeKind::BinaryExpr(op), span, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, FrontendError> {
        let op = match self.peek_kind() {
            TokenKind::Minus => UnOp::Neg,
            TokenKind::Bang => UnOp::Not,
            _ => return self.primary(),
        };
        let start = self.bump().span;
        let operand = self.unary()?;
        let span = start.to(operand.span);
        Ok(Node::new(NodeKind::UnaryExpr(op), span, vec![operand]))
    }

    fn primary(&mut self) -> Result<Node, FrontendError> {
        match self.peek_kind().clone() {
            TokenKind::Int(v) => Ok(Node::leaf(NodeKind::IntLiteral(v), self.bump().span)),
            TokenKind::Float(text) => Ok(Node::leaf(NodeKind::FloatLiteral(text), self.bump().span)),
            TokenKind::Str(text) => {
                if self.in_call_args == 0 {
                    return self.error("expression (string literals are only allowed as call arguments)");
                }
                Ok(Node::leaf(NodeKind::StringLiteral(text), self.bump().span))
            }
            TokenKind::LParen => {
                self.bump();
                // parentheses reset the call-argument context
                let saved = std::mem::replace(&mut self.in_call_args, 0);
                let inner = self.expr();
                self.in_call_args = saved;
                let inner = inner?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            TokenKind::Ident(_) => self.name_expr(self.in_call_args > 0),
            _ => self.error("expression"),
        }
    }

    /// Identifier-led expression: variable, array element or call.
    fn name_expr(&mut self, allow_bare_array: bool) -> Result<Node, FrontendError> {
        if *self.peek_nth(1) == TokenKind::LParen {
            let saved = std::mem::replace(&mut self.in_call_args, 0);
            let r = self.call();
            self.in_call_args = saved;
            return r;
        }
        let (name, span) = self.ident()?;
        let Some(sym) = self.lookup(&name).cloned() else {
            return Err(FrontendError::UnresolvedName { span, name });
        };
        if *self.peek_kind() != TokenKind::LBrack {
            if sym.dims > 0 && !allow_bare_array {
                return Err(FrontendError::Semantic {
                    span,
                    message: format!("array `{name}` used without a subscript"),
                });
            }
            return Ok(Node::leaf(NodeKind::VarRef(name), span));
        }
        let saved = std::mem::replace(&mut self.in_call_args, 0);
        let mut indices = Vec::new();
        let res: Result<(), FrontendError> = (|| {
            while self.eat(&TokenKind::LBrack) {
                indices.push(self.expr()?);
                self.expect(TokenKind::RBrack, "`]`")?;
            }
            Ok(())
        })();
        self.in_call_args = saved;
        res?;
        if indices.len() != sym.dims {
            return Err(FrontendError::Semantic {
                span: span.to(self.prev_span()),
                message: format!(
                    "`{name}` has {} dimension(s) but is indexed with {}",
                    sym.dims,
                    indices.len()
                ),
            });
        }
        Ok(Node::new(
            NodeKind::ArrayAccess { name },
            span.to(self.prev_span()),
            indices,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::lexer::tokenize;

    fn parse_src(src: &str) -> Result<Node, FrontendError> {
        parse(&tokenize(src)?)
    }

    fn count(node: &Node, pred: impl Fn(&NodeKind) -> bool + Copy) -> usize {
        let mut n = 0;
        node.walk(&mut |x| {
            if pred(&x.kind) {
                n += 1;
            }
        });
        n
    }

    #[test]
    fn skeleton_program() {
        let tu = parse_src("int main(){int i; for(i=0;i<10;i++){;}return 0;}").unwrap();
        assert_eq!(tu.kind, NodeKind::TranslationUnit);
        assert_eq!(tu.children.len(), 1);
        assert!(matches!(tu.children[0].kind, NodeKind::FunctionDef { .. }));
        assert_eq!(count(&tu, |k| *k == NodeKind::ForLoop), 1);
        let mut for_node = None;
        tu.walk(&mut |n| {
            if n.kind == NodeKind::ForLoop {
                for_node = Some(n.clone());
            }
        });
        assert_eq!(for_node.unwrap().children.len(), 4);
    }

    #[test]
    fn loop_at_top_level_is_rejected() {
        let err = parse_src("for(i=0;i<n;i++)").unwrap_err();
        assert!(matches!(err, FrontendError::Parse { .. }), "{err:?}");
    }

    #[test]
    fn undeclared_identifier() {
        match parse_src("int f(){x=1;}").unwrap_err() {
            FrontendError::UnresolvedName { name, .. } => assert_eq!(name, "x"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn params_and_globals_resolve() {
        let src = "double g[8][8];\nvoid f(int n, double a[], double b[][8]) { int i; for (i = 0; i < n; i++) a[i] = b[i][0] + g[i][1]; }";
        parse_src(src).unwrap();
    }

    #[test]
    fn wrong_index_count_is_rejected() {
        assert!(matches!(
            parse_src("void f(){ double a[4][4]; a[1] = 0.0; }"),
            Err(FrontendError::Semantic { .. })
        ));
    }

    #[test]
    fn shadowing_is_rejected() {
        assert!(parse_src("void f(int n){ { int n; } }").is_err());
        // sibling scopes may reuse a name
        parse_src("void f(){ for (int i = 0; i < 3; i++) ; for (int i = 0; i < 3; i++) ; }").unwrap();
    }

    #[test]
    fn precedence_and_associativity() {
        let tu = parse_src("void f(){ int x; x = 1 - 2 - 3 * 4; }").unwrap();
        let body = &tu.children[0].children[0];
        let assign = &body.children[1];
        let rhs = &assign.children[1];
        // (1 - 2) - (3 * 4)
        assert_eq!(rhs.kind, NodeKind::BinaryExpr(BinOp::Sub));
        assert_eq!(rhs.children[0].kind, NodeKind::BinaryExpr(BinOp::Sub));
        assert_eq!(rhs.children[1].kind, NodeKind::BinaryExpr(BinOp::Mul));
    }

    #[test]
    fn increments_and_calls() {
        let tu = parse_src(
            "void f(int n){ int h[8]; int b[8]; int i; for (i = 0; i < n; ++i) { h[b[i]]++; printf(\"%d\", h[0]); } }",
        )
        .unwrap();
        assert_eq!(count(&tu, |k| *k == NodeKind::CompoundAssign(AssignOp::Inc)), 2);
        assert_eq!(count(&tu, |k| matches!(k, NodeKind::Call { .. })), 1);
    }

    #[test]
    fn string_outside_call_is_rejected() {
        assert!(parse_src("void f(){ int x; x = \"s\"; }").is_err());
    }

    #[test]
    fn bare_array_only_in_call_args() {
        parse_src("void f(){ double a[4]; g(a); }").unwrap();
        assert!(parse_src("void f(){ double a[4]; double x; x = a; }").is_err());
    }
}
