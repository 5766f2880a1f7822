//! Exact arithmetic for finite extensions of `Q_p` and the valued hyperfields
//! obtained from them by quotienting the unit group by `1 + m^n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`residue`] finite fields `F_q` and their embeddings,
//! * [`local`] totally ramified extensions of unramified `Q_q` given by an
//!   Eisenstein polynomial, with canonical Teichmüller digit expansions,
//! * [`hyperfield`] the hyperfields `H_n(K)`, ball-valued addition and an
//!   axiom checker,
//! * [`triples`] truncated DVR triples `(R, M, ε)`, the functors `T_n`, `Tr`
//!   and `U`,
//! * [`lifting`] enumeration and validation of hyperfield homomorphisms and
//!   their lifts to field embeddings,
//! * [`fieldfile`] the plain-text field description format and [`expr`]
//!   element expressions,
//! * [`oracle`] a brute-force coset enumerator used to cross-check addition.
//!
//! Valuations are normalised so that `ν(p) = 1`. Internally they are stored as
//! integers in units of `ν(π) = 1/e`.

pub mod error;
pub mod expr;
pub mod fieldfile;
pub mod hyperfield;
pub mod lifting;
pub mod local;
pub mod oracle;
mod par;
pub mod residue;
pub mod triples;

pub use error::{Error, Result};
pub use hyperfield::{Ball, HClass, HFDesc};
pub use local::{FieldRef, LFElem, LocalField, Value};
pub use residue::{Embedding, FFDesc, FFElem};
