use crate::error::Result;
use crate::tfhe::keys::ServerKey;
use crate::tfhe::lwe::{encode_bool, LweCiphertext};
use crate::torus::TorusPoly;

/// Test vector that maps a positive phase to `+q/8` and a negative one to
/// `-q/8` (negacyclic wrap does the sign flip).
pub fn sign_test_vector(server: &ServerKey) -> TorusPoly {
    let q = server.params.modulus();
    TorusPoly::from_coeffs(vec![encode_bool(true, q); server.params.big_n], q).expect("power-of-two N")
}

/// Encrypted NAND: bootstrap `q/8 - c1 - c2` through the sign function, then
/// keyswitch back to the input key.
pub fn gate_nand(c1: &LweCiphertext, c2: &LweCiphertext, server: &ServerKey) -> Result<LweCiphertext> {
    let q = server.params.modulus();
    let lin = c1.add(c2)?.neg().add_constant(encode_bool(true, q));
    let out = server.pbs_with_test_vector(&lin, &sign_test_vector(server))?;
    server.keyswitch(&out)
}

/// Encrypted NOT; linear, no bootstrap.
pub fn gate_not(c: &LweCiphertext) -> LweCiphertext {
    c.neg()
}
