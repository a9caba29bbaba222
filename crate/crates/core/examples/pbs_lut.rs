//! Programmable bootstrapping: evaluate a 3-bit lookup table on encrypted
//! messages and print the decrypted results.
//!
//! cargo run --example pbs_lut -- [param-set]

use strix::tfhe::{keygen, Encoding, LookUpTable, TfheParams, TfheRng};

fn main() -> strix::Result<()> {
    let set = std::env::args().nth(1).unwrap_or_else(|| "I".into());
    let params = TfheParams::resolve(&set)?;
    let (client, server) = keygen(&params, 7)?;
    let enc = Encoding::new(3);
    let square = LookUpTable::from_fn(enc, |m| (m * m) % 8)?;
    let mut rng = TfheRng::from_seed(8);
    for m in 0..enc.message_space() {
        let c = client.encrypt(m, enc, &mut rng)?;
        let out = server.apply_lut(&c, &square)?;
        println!("{m}^2 mod 8 = {}", client.decrypt(&out, enc)?);
    }
    Ok(())
}
