//! Plain-text field descriptions.
//!
//! A field file is a TOML document with these keys:
//!
//! ```text
//! # Q_3(√3)
//! name = "Q3(sqrt3)"        # optional
//! p = 3
//! f = 1                     # optional, defaults to 1
//! modulus = [1, 0, 1]       # GF(p) coefficients of the residue modulus, ascending; needed when f > 1
//! eisenstein = [-3, 0, 1]   # a_0 .. a_e, ascending
//! precision = 24            # π-adic digits carried by every element
//! ```
//!
//! Each Eisenstein coefficient is either an integer or a list of residue
//! field indices `[d_0, d_1, ..]` standing for `Σ t(d_j) p^j`. Residue indices
//! encode `c_0 + c_1 p + .. + c_{f-1} p^{f-1}` for the element
//! `Σ c_i t^i` of `GF(p)[t]/(modulus)`.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::local::{Coefficient, FieldRef, LocalField};
use crate::residue::FFDesc;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldFile {
    name: Option<String>,
    p: u32,
    f: Option<u32>,
    modulus: Option<Vec<u32>>,
    eisenstein: Vec<Coefficient>,
    precision: u32,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses a field file and builds the field it describes.
pub fn parse_field(text: &str) -> Result<FieldRef> {
    let spec: FieldFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let located = |key: &str, message: String| {
        let offset = text
            .lines()
            .scan(0usize, |pos, l| {
                let start = *pos;
                *pos += l.len() + 1;
                Some((start, l))
            })
            .find(|(_, l)| l.trim_start().starts_with(key))
            .map_or(0, |(s, l)| s + (l.len() - l.trim_start().len()));
        let (line, column) = line_col(text, offset);
        Error::Parse {
            line,
            column,
            message,
        }
    };
    let f = spec.f.unwrap_or(1);
    let residue = match (f, spec.modulus) {
        (1, None) => FFDesc::prime(spec.p),
        (_, Some(m)) => {
            if m.len() != f as usize + 1 {
                return Err(located(
                    "modulus",
                    format!("modulus must have f + 1 = {} coefficients", f + 1),
                ));
            }
            FFDesc::new(spec.p, m)
        }
        (_, None) => return Err(located("f", "f > 1 needs a residue modulus".into())),
    }
    .map_err(|e| match e {
        Error::InvalidResidueField(m) => located("modulus", m),
        other => other,
    })?;
    let name = spec.name.unwrap_or_else(|| {
        format!(
            "K(p={}, f={}, e={})",
            spec.p,
            f,
            spec.eisenstein.len().saturating_sub(1)
        )
    });
    LocalField::new(name, residue, spec.eisenstein, spec.precision)
}

/// Reads and parses a field file from disk.
pub fn read_field(path: &std::path::Path) -> Result<FieldRef> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_field(&text)
}

/// Renders a field back into the file format.
pub fn render_field(field: &LocalField) -> String {
    let mut out = format!("name = {:?}\np = {}\n", field.name(), field.p());
    if field.f() > 1 {
        out += &format!(
            "f = {}\nmodulus = {:?}\n",
            field.f(),
            field.residue().modulus()
        );
    }
    let coeffs: Vec<String> = field
        .eisenstein()
        .iter()
        .map(|c| match c {
            Coefficient::Int(n) => n.to_string(),
            Coefficient::Digits(d) => format!("{d:?}"),
        })
        .collect();
    out += &format!(
        "eisenstein = [{}]\nprecision = {}\n",
        coeffs.join(", "),
        field.precision()
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ramified_field() {
        let k = parse_field(
            "# comment\np = 3\neisenstein = [-3, 0, 1]\nprecision = 12\nname = \"Q3(sqrt3)\"\n",
        )
        .unwrap();
        assert_eq!((k.p(), k.f(), k.e(), k.precision()), (3, 1, 2, 12));
        assert_eq!(k.name(), "Q3(sqrt3)");
    }

    #[test]
    fn parses_unramified_with_digit_coefficients() {
        let k = parse_field(
            "p = 3\nf = 2\nmodulus = [1, 0, 1]\neisenstein = [[0, 1], 1]\nprecision = 6\n",
        )
        .unwrap();
        assert_eq!((k.f(), k.e()), (2, 1));
        assert_eq!(parse_field(&render_field(&k)).unwrap(), k);
    }

    #[test]
    fn syntax_errors_carry_location() {
        let err = parse_field("p = 3\neisenstein = [-3, 0, 1\nprecision = 12\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2.., .. }), "{err}");
        let err = parse_field("p = 3\nprecison = 12\neisenstein = [-3, 1]\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 2,
                    column: 1,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn bad_modulus_is_located() {
        let err =
            parse_field("p = 3\nf = 2\nmodulus = [2, 0, 1]\neisenstein = [-3, 1]\nprecision = 4\n")
                .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn non_eisenstein_is_rejected() {
        let err = parse_field("p = 3\neisenstein = [-9, 0, 1]\nprecision = 8\n").unwrap_err();
        assert!(matches!(err, Error::NotEisenstein(_)));
    }
}
