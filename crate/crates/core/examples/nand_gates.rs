//! Encrypted NAND truth table and a half adder built from NAND gates.

use strix::tfhe::{gate_nand, keygen, ParamSet, TfheRng};

fn main() -> strix::Result<()> {
    let (client, server) = keygen(&ParamSet::I.params(), 11)?;
    let mut rng = TfheRng::from_seed(12);
    for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
        let ca = client.encrypt_bool(a, &mut rng);
        let cb = client.encrypt_bool(b, &mut rng);
        let nand = gate_nand(&ca, &cb, &server)?;
        // xor from four nands, and from nand + not
        let t = gate_nand(&ca, &cb, &server)?;
        let x = gate_nand(&gate_nand(&ca, &t, &server)?, &gate_nand(&cb, &t, &server)?, &server)?;
        let and = strix::tfhe::gate_not(&nand);
        println!(
            "a={} b={}  nand={}  sum={} carry={}",
            u8::from(a),
            u8::from(b),
            u8::from(client.decrypt_bool(&nand)?),
            u8::from(client.decrypt_bool(&x)?),
            u8::from(client.decrypt_bool(&and)?)
        );
    }
    Ok(())
}
