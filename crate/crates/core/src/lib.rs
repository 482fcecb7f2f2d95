pub mod error;
pub mod fusion_ring;
pub mod number;
pub mod path_net;
pub mod type_classifier;
pub mod k_theory;
pub mod toric_pauli;
pub mod exact_oracle;

// Book chapters run as doctests of this crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fusion-rings.md")]
    mod fusion_rings {}
    #[doc = include_str!("../../../book/src/path-nets.md")]
    mod path_nets {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/toric-code.md")]
    mod toric_code {}
    #[doc = include_str!("../../../book/src/exact-oracle.md")]
    mod exact_oracle {}
    #[doc = include_str!("../../../book/src/k-theory.md")]
    mod k_theory {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
