//! Both encryption schemes, their decryptors, keystream expansion, and the
//! ground-truth equivalent-key export used by evaluation.

pub mod etc;
pub mod etcs;
mod keystream;
mod wmap;

pub use etc::{etc_decrypt, etc_encrypt, ETC_BLOCK};
pub use etcs::{etcs_decrypt, etcs_encrypt, etcs_encrypt_rotations};
pub use keystream::{keystream, Key, KeyStream, Scheme};
pub use wmap::{WEntry, WMap};
