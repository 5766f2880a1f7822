//! Class expressions for `hf eval`: `[x]`, `[x] OP [y]` with `OP` one of
//! `add sub mul div`, `OP [x]` with `OP` one of `neg inv val`, and
//! `[x] pow k`. Operands are element expressions.

use hyperval::{Error, Result};

fn bad(msg: String) -> Error {
    Error::InvalidInput(msg)
}

/// A parsed class expression; operands are element expressions.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassExpr {
    Show(String),
    Binary(String, BinOp, String),
    Unary(UnOp, String),
    Pow(String, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Inv,
    Val,
}

enum Piece {
    Class(String),
    Word(String),
}

fn pieces(s: &str) -> Result<Vec<Piece>> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix('[') {
            let end = r
                .find(']')
                .ok_or_else(|| bad(format!("unclosed bracket in {s:?}")))?;
            out.push(Piece::Class(r[..end].trim().to_string()));
            rest = r[end + 1..].trim_start();
        } else {
            let end = rest.find([' ', '[']).unwrap_or(rest.len());
            out.push(Piece::Word(rest[..end].to_string()));
            rest = rest[end..].trim_start();
        }
    }
    Ok(out)
}

pub fn parse_class_expr(s: &str) -> Result<ClassExpr> {
    use Piece::*;
    let ps = pieces(s)?;
    match ps.as_slice() {
        [Class(a)] => Ok(ClassExpr::Show(a.clone())),
        [Class(a), Word(op), Class(b)] => {
            let op = match op.as_str() {
                "add" | "+" => BinOp::Add,
                "sub" | "-" => BinOp::Sub,
                "mul" | "*" => BinOp::Mul,
                "div" | "/" => BinOp::Div,
                _ => return Err(bad(format!("unknown binary operation {op:?}"))),
            };
            Ok(ClassExpr::Binary(a.clone(), op, b.clone()))
        }
        [Word(op), Class(a)] => {
            let op = match op.as_str() {
                "neg" => UnOp::Neg,
                "inv" => UnOp::Inv,
                "val" => UnOp::Val,
                _ => return Err(bad(format!("unknown unary operation {op:?}"))),
            };
            Ok(ClassExpr::Unary(op, a.clone()))
        }
        [Class(a), Word(op), Word(k)] if op == "pow" => {
            let k = k
                .parse()
                .map_err(|_| bad(format!("exponent {k:?} is not an integer")))?;
            Ok(ClassExpr::Pow(a.clone(), k))
        }
        _ => Err(bad(format!(
            "cannot parse {s:?}; expected [x], [x] OP [y], OP [x] or [x] pow k"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_expressions() {
        assert_eq!(
            parse_class_expr("[1] add [-1]").unwrap(),
            ClassExpr::Binary("1".into(), BinOp::Add, "-1".into())
        );
        assert_eq!(
            parse_class_expr("inv [1 + pi]").unwrap(),
            ClassExpr::Unary(UnOp::Inv, "1 + pi".into())
        );
        assert_eq!(
            parse_class_expr("[pi] pow -3").unwrap(),
            ClassExpr::Pow("pi".into(), -3)
        );
        assert_eq!(
            parse_class_expr("[7]").unwrap(),
            ClassExpr::Show("7".into())
        );
        assert!(parse_class_expr("[1] frob [2]").is_err());
        assert!(parse_class_expr("[1").is_err());
    }
}
