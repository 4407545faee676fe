//! Built-in right-angled groups: exact element arithmetic, finite
//! presentations, certificates for the generating chain and the coset
//! actions on finite quotients.

mod action;
mod element;
mod family;
mod word;

pub use action::PermutationAction;
pub use element::{GroupElement, Mat3};
pub use family::{
    make_family, CertificateFailure, FamilyTag, GeneratorChain, GroupInstance,
    InfiniteOrderEvidence, Quotient, RightAngledCertificate, MAX_QUOTIENT_SIZE, SL3_CHAIN,
    SUPPORTED_PRIMES,
};
pub use word::{commutator, inverse_word, reduced_words, signed_form, word, Letter, Word};
