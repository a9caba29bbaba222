//! Writes the set I keys in the binary key format and reads them back.

use strix::tfhe::{keygen, BootstrappingKey, KeyCodec, KeyswitchKey, ParamSet};

fn main() -> strix::Result<()> {
    let (client, server) = keygen(&ParamSet::I.params(), 3)?;
    let dir = std::env::temp_dir().join("strix-keys");
    std::fs::create_dir_all(&dir)?;
    let bsk_path = dir.join("bsk.bin");
    let ksk_path = dir.join("ksk.bin");
    std::fs::write(&bsk_path, server.bsk.to_bytes())?;
    std::fs::write(&ksk_path, server.ksk.to_bytes())?;
    std::fs::write(dir.join("lwe.key"), client.lwe.to_bytes())?;
    let bsk = BootstrappingKey::from_bytes(&std::fs::read(&bsk_path)?)?;
    let ksk = KeyswitchKey::from_bytes(&std::fs::read(&ksk_path)?)?;
    println!("bsk: {} GGSWs, {} bytes", bsk.len(), std::fs::metadata(&bsk_path)?.len());
    println!("ksk: {} rows, {} bytes", ksk.rows(), std::fs::metadata(&ksk_path)?.len());
    println!("roundtrip ok: {}", bsk.ggsw == server.bsk.ggsw && ksk == server.ksk);
    Ok(())
}
