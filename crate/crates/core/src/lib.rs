//! TFHE programmable bootstrapping with a performance model of a streaming
//! TFHE accelerator.
//!
//! The crate has two halves. [`torus`], [`transform`] and [`tfhe`] form a
//! working TFHE engine: key generation, encryption, gadget decomposition,
//! blind rotation, programmable bootstrapping, keyswitching and boolean
//! gates. [`sched`] and [`archsim`] model how an accelerator with
//! test-vector, coefficient, polynomial and column level parallelism
//! schedules and executes that same work, reporting latency, throughput,
//! unit utilization and HBM bandwidth.
//!
//! ```
//! use strix::tfhe::{keygen, Encoding, LookUpTable, ParamSet, TfheRng};
//!
//! let params = ParamSet::I.params();
//! let (client, server) = keygen(&params, 1).unwrap();
//! let enc = Encoding::new(2);
//! let lut = LookUpTable::from_fn(enc, |m| (m + 1) % 4).unwrap();
//! let mut rng = TfheRng::from_seed(2);
//! let c = client.encrypt(3, enc, &mut rng).unwrap();
//! let out = server.apply_lut(&c, &lut).unwrap();
//! assert_eq!(client.decrypt(&out, enc).unwrap(), 0);
//! ```

pub mod archsim;
pub mod cli;
pub mod error;
pub mod report;
pub mod sched;
pub mod tfhe;
pub mod torus;
pub mod transform;
pub mod trials;

pub use error::{Error, Result};
