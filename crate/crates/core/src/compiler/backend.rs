//! Classical encryption backends the compiler can wrap.

use rand::{Rng, RngCore};
use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// A public-key encryption scheme on bit strings.
pub trait SemanticScheme: Send + Sync {
    fn gen(&self, security: usize, rng: &mut dyn RngCore) -> (Vec<u8>, Vec<u8>);
    fn enc(&self, public_key: &[u8], message: &BitString, rng: &mut dyn RngCore) -> Result<Vec<u8>>;
    fn dec(&self, secret_key: &[u8], ciphertext: &[u8]) -> Result<BitString>;
}

const CT_TAG: u8 = 0xc1;
const NONCE_LEN: usize = 8;
const MAC_LEN: usize = 16;

/// Toy keyed-permutation cipher. NOT SECURE: the public key is the secret
/// key. It exists to exercise the compiler end to end with exact
/// correctness; security numbers come from the harness's idealized mode.
///
/// Ciphertext layout: `0xC1 ‖ nonce[8] ‖ bit_len (u16 BE) ‖ body ‖ mac[16]`,
/// where `body` is the MSB-first packed message XORed with a SHA-256
/// keystream.
#[derive(Clone, Copy, Debug, Default)]
pub struct ToyCipher;

impl ToyCipher {
    fn keystream(key: &[u8], nonce: &[u8], len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(len + 32);
        let mut counter = 0u32;
        while out.len() < len {
            let mut h = Sha256::new();
            h.update(b"toy-stream");
            h.update(key);
            h.update(nonce);
            h.update(counter.to_be_bytes());
            out.extend_from_slice(&h.finalize());
            counter += 1;
        }
        out.truncate(len);
        out
    }

    fn mac(key: &[u8], header: &[u8], body: &[u8]) -> [u8; MAC_LEN] {
        let mut h = Sha256::new();
        h.update(b"toy-mac");
        h.update(key);
        h.update(header);
        h.update(body);
        let digest = h.finalize();
        let mut out = [0u8; MAC_LEN];
        out.copy_from_slice(&digest[..MAC_LEN]);
        out
    }

    /// Encryption with an explicit nonce.
    pub fn enc_with_nonce(key: &[u8], message: &BitString, nonce: [u8; NONCE_LEN]) -> Result<Vec<u8>> {
        let bit_len = u16::try_from(message.len())
            .map_err(|_| Error::Input("message longer than 65535 bits".into()))?;
        let packed = message.to_packed_bytes();
        let stream = Self::keystream(key, &nonce, packed.len());
        let body: Vec<u8> = packed.iter().zip(&stream).map(|(a, b)| a ^ b).collect();
        let mut out = vec![CT_TAG];
        out.extend_from_slice(&nonce);
        out.extend_from_slice(&bit_len.to_be_bytes());
        let mac = Self::mac(key, &out, &body);
        out.extend_from_slice(&body);
        out.extend_from_slice(&mac);
        Ok(out)
    }
}

impl SemanticScheme for ToyCipher {
    fn gen(&self, _security: usize, rng: &mut dyn RngCore) -> (Vec<u8>, Vec<u8>) {
        let mut key = vec![0u8; 32];
        rng.fill_bytes(&mut key);
        (key.clone(), key)
    }

    fn enc(&self, public_key: &[u8], message: &BitString, rng: &mut dyn RngCore) -> Result<Vec<u8>> {
        let nonce: [u8; NONCE_LEN] = rng.gen();
        Self::enc_with_nonce(public_key, message, nonce)
    }

    fn dec(&self, secret_key: &[u8], ciphertext: &[u8]) -> Result<BitString> {
        let header_len = 1 + NONCE_LEN + 2;
        if ciphertext.len() < header_len + MAC_LEN || ciphertext[0] != CT_TAG {
            return Err(Error::Decryption("malformed ciphertext".into()));
        }
        let (header, rest) = ciphertext.split_at(header_len);
        let bit_len = u16::from_be_bytes([header[1 + NONCE_LEN], header[2 + NONCE_LEN]]) as usize;
        let (body, mac) = rest.split_at(rest.len() - MAC_LEN);
        if body.len() != bit_len.div_ceil(8) {
            return Err(Error::Decryption("length field does not match body".into()));
        }
        if Self::mac(secret_key, header, body) != mac {
            return Err(Error::Decryption("authentication failed".into()));
        }
        let stream = Self::keystream(secret_key, &header[1..1 + NONCE_LEN], body.len());
        let packed: Vec<u8> = body.iter().zip(&stream).map(|(a, b)| a ^ b).collect();
        BitString::from_packed_bytes(&packed, bit_len).map_err(|e| Error::Decryption(e.to_string()))
    }
}
