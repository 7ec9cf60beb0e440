use serde::Serialize;
use std::fmt;

use super::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CType {
    Int,
    Long,
    Float,
    Double,
    Void,
}

impl CType {
    pub fn as_str(self) -> &'static str {
        match self {
            CType::Int => "int",
            CType::Long => "long",
            CType::Float => "float",
            CType::Double => "double",
            CType::Void => "void",
        }
    }
}

/// One array dimension as written in a declaration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Dim {
    Const(i64),
    /// Sized by a parameter or other in-scope integer.
    Named(String),
    /// `a[]` in a parameter list.
    Unsized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AssignOp {
    Add,
    Sub,
    Mul,
    Div,
    /// `x++` / `++x`; no value child.
    Inc,
    /// `x--` / `--x`; no value child.
    Dec,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
            AssignOp::Inc => "++",
            AssignOp::Dec => "--",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength, higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 6,
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UnOp {
    Neg,
    Not,
}

/// Node kind plus its kind-specific payload.
///
/// Child layout per kind:
/// - `FunctionDef`: parameter `VarDecl`s, then the body `Block`
/// - `VarDecl`: optional initializer
/// - `ForLoop`: init, condition, step, body
/// - `WhileLoop`: condition, body
/// - `If`: condition, then, optional else
/// - `Assign`: target, value
/// - `CompoundAssign`: target, value (target only for `Inc`/`Dec`)
/// - `Call`: arguments
/// - `ArrayAccess`: one index expression per dimension
/// - `Return`: optional value
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    TranslationUnit,
    FunctionDef { ret: CType, name: String },
    VarDecl { ty: CType, name: String, dims: Vec<Dim> },
    Block,
    ForLoop,
    WhileLoop,
    If,
    Assign,
    CompoundAssign(AssignOp),
    Call { callee: String },
    ArrayAccess { name: String },
    BinaryExpr(BinOp),
    UnaryExpr(UnOp),
    VarRef(String),
    IntLiteral(i64),
    FloatLiteral(String),
    StringLiteral(String),
    Return,
}

impl NodeKind {
    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::TranslationUnit => "TranslationUnit",
            NodeKind::FunctionDef { .. } => "FunctionDef",
            NodeKind::VarDecl { .. } => "VarDecl",
            NodeKind::Block => "Block",
            NodeKind::ForLoop => "ForLoop",
            NodeKind::WhileLoop => "WhileLoop",
            NodeKind::If => "If",
            NodeKind::Assign => "Assign",
            NodeKind::CompoundAssign(_) => "CompoundAssign",
            NodeKind::Call { .. } => "Call",
            NodeKind::ArrayAccess { .. } => "ArrayAccess",
            NodeKind::BinaryExpr(_) => "BinaryExpr",
            NodeKind::UnaryExpr(_) => "UnaryExpr",
            NodeKind::VarRef(_) => "VarRef",
            NodeKind::IntLiteral(_) => "IntLiteral",
            NodeKind::FloatLiteral(_) => "FloatLiteral",
            NodeKind::StringLiteral(_) => "StringLiteral",
            NodeKind::Return => "Return",
        }
    }

    pub fn is_statement(&self) -> bool {
        matches!(
            self,
            NodeKind::VarDecl { .. }
                | NodeKind::Block
                | NodeKind::ForLoop
                | NodeKind::WhileLoop
                | NodeKind::If
                | NodeKind::Assign
                | NodeKind::CompoundAssign(_)
                | NodeKind::Call { .. }
                | NodeKind::Return
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub kind: NodeKind,
    pub span: SourceSpan,
    pub children: Vec<Node>,
}

impl Node {
    pub fn new(kind: NodeKind, span: SourceSpan, children: Vec<Node>) -> Node {
        Node { kind, span, children }
    }

    pub fn leaf(kind: NodeKind, span: SourceSpan) -> Node {
        Node::new(kind, span, Vec::new())
    }

    /// Equality on kinds and child structure, ignoring spans.
    pub fn same_shape(&self, other: &Node) -> bool {
        self.kind == other.kind
            && self.children.len() == other.children.len()
            && self.children.iter().zip(&other.children).all(|(a, b)| a.same_shape(b))
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Node)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    pub fn any(&self, pred: &impl Fn(&Node) -> bool) -> bool {
        pred(self) || self.children.iter().any(|c| c.any(pred))
    }

    pub fn var_name(&self) -> Option<&str> {
        match &self.kind {
            NodeKind::VarRef(n) => Some(n),
            _ => None,
        }
    }

    /// Name of the variable an assignment target (scalar or array) refers to.
    pub fn target_name(&self) -> Option<&str> {
        match &self.kind {
            NodeKind::VarRef(n) | NodeKind::ArrayAccess { name: n } => Some(n),
            _ => None,
        }
    }

    pub fn int_value(&self) -> Option<i64> {
        match self.kind {
            NodeKind::IntLiteral(v) => Some(v),
            _ => None,
        }
    }

    /// Every variable name referenced (reads or writes) anywhere below this node.
    pub fn referenced_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        self.walk(&mut |n| {
            if let Some(name) = n.target_name() {
                if !names.iter().any(|x: &String| x == name) {
                    names.push(name.to_string());
                }
            }
        });
        names
    }

    /// Number of statements in a statement subtree; blocks themselves are not counted.
    pub fn count_statements(&self) -> usize {
        match self.kind {
            NodeKind::Block => self.children.iter().map(Node::count_statements).sum(),
            NodeKind::If => 1 + self.children[1..].iter().map(Node::count_statements).sum::<usize>(),
            NodeKind::ForLoop => 1 + self.children[3].count_statements(),
            NodeKind::WhileLoop => 1 + self.children[1].count_statements(),
            _ => 1,
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::unparse::unparse_expr(self))
    }
}
