//! Classified isocones `⊞_{x∈P} I_x`, membership oracles, Bloch regions,
//! the axiom checker and the saturation engine.

mod axioms;
mod cone;
mod layer_cake;
mod nnls;
pub mod region;
mod sampler;
mod saturate;

pub use axioms::{check_axioms, Axiom, AxiomConfig, AxiomOutcome, AxiomReport, AxiomStatus, Counterexample};
pub use cone::{
    lexicographic_sum_isocone, m2_membership, ClassifiedIsocone, InnerCone, Membership, MembershipOracle,
    SignedPsdSet, Verdict,
};
pub use layer_cake::{layer_cake, layer_cake_element, LayerCake};
pub use region::BlochRegion;
pub use saturate::{saturate, GeneratorCone, GeneratorSampler, RoundRecord, SaturationConfig, SaturationReport};
pub use sampler::{ClassifiedSampler, ElementSampler, RejectionSampler};
