//! S-ring constructions and structural detectors.

pub mod dense;
pub mod detect;
pub mod duality;
pub mod notation;
pub mod products;
pub mod subdirect;

pub use dense::{decompose_basic_set, BasicSetDecomposition};
pub use detect::{
    all_decompositions, detect_cyclotomic, detect_generalized_wreath, detect_otimes_complemented,
    detect_tensor, Decomposition,
};
pub use duality::dual;
pub use notation::parse_automorphism;
pub use products::{cyclotomic, generalized_wreath, group_ring, tensor, trivial_sring, wreath};
pub use subdirect::{subdirect_k, SubdirectSpec};
