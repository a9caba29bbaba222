//! TFHE over `Z_q`: keys, encryption, bootstrapping and keyswitching.

pub mod bootstrap;
pub mod decompose;
pub mod gates;
pub mod glwe;
pub mod keys;
pub mod keyswitch;
pub mod lwe;
pub mod params;
pub mod rng;

pub use bootstrap::{
    blind_rotate, external_product, external_product_naive, mod_switch_lwe, pbs, sample_extract,
    BootstrappingKey, LookUpTable,
};
pub use decompose::{gadget_decompose, Decomposer};
pub use gates::{gate_nand, gate_not};
pub use glwe::{GgswCiphertext, GlweCiphertext, GlweSecretKey, SpectralGgsw};
pub use keys::{keygen, ClientKey, KeyCodec, ServerKey};
pub use keyswitch::{keyswitch, KeyswitchKey};
pub use lwe::{decrypt_lwe, encrypt_lwe, Encoding, LweCiphertext, LweSecretKey};
pub use params::{ParamSet, TfheParams};
pub use rng::TfheRng;
