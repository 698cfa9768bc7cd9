//! Exact computations for the twisted Heegaard Floer homology of `Σ_g × S¹`
//! and for fiber-sum product formulas of closed four-manifold invariants.

pub mod demos;
pub mod error;
pub mod extalg;
pub mod fibersum;
pub mod groupring;
pub mod invfile;
pub mod linalg;
pub mod pairing;
pub mod plane;
pub mod selftest;
pub mod surgery;

pub use error::{Error, Result};
pub use extalg::{ExtElem, Mono, SympBasis};
pub use fibersum::{AMonomial, ClassToken, ClosedInvariant, Entry, SimpleTypeReport};
pub use groupring::{GroupRingElem, LaurentSeries, SpincGrading, Window, DEFAULT_TRUNC};
pub use invfile::{parse_invariant, print_invariant};
pub use pairing::{dual_basis, AElem, DualBasis, DualBasisData};
pub use plane::{PlaneElem, Rank, Region, Slot};
pub use surgery::{Kernel, XgdElem};
