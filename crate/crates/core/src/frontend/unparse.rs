//! AST back to C text.
//!
//! The output re-parses to a structurally identical tree. Comments,
//! directives and original formatting are not reproduced; rewriting of user
//! files goes through span-based insertion instead.

use super::ast::{AssignOp, Node, NodeKind};

const INDENT: &str = "    ";

pub fn unparse(node: &Node) -> String {
    let mut out = String::new();
    match node.kind {
        NodeKind::TranslationUnit => {
            for (i, item) in node.children.iter().enumerate() {
                if i > 0 && matches!(item.kind, NodeKind::FunctionDef { .. }) {
                    out.push('\n');
                }
                stmt(item, 0, &mut out);
            }
        }
        _ if node.kind.is_statement() || matches!(node.kind, NodeKind::FunctionDef { .. }) => stmt(node, 0, &mut out),
        _ => out.push_str(&unparse_expr(node)),
    }
    out
}

fn pad(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn decl_text(node: &Node) -> String {
    let NodeKind::VarDecl { ty, name, dims } = &node.kind else {
        unreachable!("decl_text on {}", node.kind.name())
    };
    let mut s = format!("{} {}", ty.as_str(), name);
    for d in dims {
        match d {
            super::ast::Dim::Const(v) => s.push_str(&format!("[{v}]")),
            super::ast::Dim::Named(n) => s.push_str(&format!("[{n}]")),
            super::ast::Dim::Unsized => s.push_str("[]"),
        }
    }
    if let Some(init) = node.children.first() {
        s.push_str(" = ");
        s.push_str(&unparse_expr(init));
    }
    s
}

/// Statement text without the trailing `;` (for-loop headers use this).
fn simple_text(node: &Node) -> String {
    match &node.kind {
        NodeKind::VarDecl { .. } => decl_text(node),
        NodeKind::Assign => format!(
            "{} = {}",
            unparse_expr(&node.children[0]),
            unparse_expr(&node.children[1])
        ),
        NodeKind::CompoundAssign(op @ (AssignOp::Inc | AssignOp::Dec)) => {
            format!("{}{}", unparse_expr(&node.children[0]), op.symbol())
        }
        NodeKind::CompoundAssign(op) => format!(
            "{} {} {}",
            unparse_expr(&node.children[0]),
            op.symbol(),
            unparse_expr(&node.children[1])
        ),
        NodeKind::Call { .. } => unparse_expr(node),
        other => unreachable!("{} is not a simple statement", other.name()),
    }
}

fn body(node: &Node, depth: usize, out: &mut String) {
    if node.kind == NodeKind::Block {
        out.push(' ');
        block(node, depth, out);
        out.push('\n');
    } else {
        out.push('\n');
        stmt(node, depth + 1, out);
    }
}

fn block(node: &Node, depth: usize, out: &mut String) {
    out.push_str("{\n");
    for c in &node.children {
        stmt(c, depth + 1, out);
    }
    pad(depth, out);
    out.push('}');
}

fn stmt(node: &Node, depth: usize, out: &mut String) {
    pad(depth, out);
    match &node.kind {
        NodeKind::FunctionDef { ret, name } => {
            let (params, body_node) = node.children.split_at(node.children.len() - 1);
            let params: Vec<String> = params.iter().map(decl_text).collect();
            out.push_str(&format!("{} {}({}) ", ret.as_str(), name, params.join(", ")));
            block(&body_node[0], depth, out);
            out.push('\n');
        }
        NodeKind::Block => {
            block(node, depth, out);
            out.push('\n');
        }
        NodeKind::ForLoop => {
            out.push_str(&format!(
                "for ({}; {}; {})",
                simple_text(&node.children[0]),
                unparse_expr(&node.children[1]),
                simple_text(&node.children[2])
            ));
            body(&node.children[3], depth, out);
        }
        NodeKind::WhileLoop => {
            out.push_str(&format!("while ({})", unparse_expr(&node.children[0])));
            body(&node.children[1], depth, out);
        }
        NodeKind::If => {
            out.push_str(&format!("if ({})", unparse_expr(&node.children[0])));
            body(&node.children[1], depth, out);
            if let Some(else_branch) = node.children.get(2) {
                pad(depth, out);
                out.push_str("else");
                body(else_branch, depth, out);
            }
        }
        NodeKind::Return => {
            out.push_str("return");
            if let Some(v) = node.children.first() {
                out.push(' ');
                out.push_str(&unparse_expr(v));
            }
            out.push_str(";\n");
        }
        _ => {
            out.push_str(&simple_text(node));
            out.push_str(";\n");
        }
    }
}

pub fn unparse_expr(node: &Node) -> String {
    match &node.kind {
        NodeKind::VarRef(name) => name.clone(),
        NodeKind::IntLiteral(v) => v.to_string(),
        NodeKind::FloatLiteral(text) => text.clone(),
        NodeKind::StringLiteral(text) => format!("\"{text}\""),
        NodeKind::ArrayAccess { name } => {
            let mut s = name.clone();
            for idx in &node.children {
                s.push('[');
                s.push_str(&unparse_expr(idx));
                s.push(']');
            }
            s
        }
        NodeKind::Call { callee } => {
            let args: Vec<String> = node.children.iter().map(unparse_expr).collect();
            format!("{}({})", callee, args.join(", "))
        }
        NodeKind::UnaryExpr(op) => {
            let sym = match op {
                super::ast::UnOp::Neg => "-",
                super::ast::UnOp::Not => "!",
            };
            let operand = &node.children[0];
            let inner = unparse_expr(operand);
            if is_primary(operand) {
                format!("{sym}{inner}")
            } else {
                format!("{sym}({inner})")
            }
        }
        NodeKind::BinaryExpr(op) => {
            let prec = op.precedence();
            let side = |child: &Node, right: bool| {
                let text = unparse_expr(child);
                match &child.kind {
                    NodeKind::BinaryExpr(c) if c.precedence() < prec || (right && c.precedence() == prec) => {
                        format!("({text})")
                    }
                    _ => text,
                }
            };
            format!(
                "{} {} {}",
                side(&node.children[0], false),
                op.symbol(),
                side(&node.children[1], true)
            )
        }
        other => format!("/* {} */", other.name()),
    }
}

fn is_primary(node: &Node) -> bool {
    matches!(
        node.kind,
        NodeKind::VarRef(_)
            | NodeKind::IntLiteral(_)
            | NodeKind::FloatLiteral(_)
            | NodeKind::ArrayAccess { .. }
            | NodeKind::Call { .. }
    )
}
