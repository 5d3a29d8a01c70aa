use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "torpedo/run-manifest.v1";

/// Provenance of one run. Wall time is deliberately absent: it goes to
/// stderr so that reruns print identical bytes.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub schema: &'static str,
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub tool_version: &'static str,
    pub result_digest: String,
}

#[derive(Serialize)]
pub struct Envelope<'a> {
    pub manifest: RunManifest,
    pub result: &'a Value,
}

/// `sha256:` followed by the hex digest of the compact JSON encoding.
pub fn digest(result: &Value) -> String {
    let bytes = serde_json::to_vec(result).expect("JSON values always serialise");
    let hash = Sha256::digest(&bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, seed: Option<u64>, result: &Value) -> Self {
        RunManifest {
            schema: SCHEMA,
            command: command.to_string(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            result_digest: digest(result),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = json!({"value": "11/12", "d": 3});
        assert_eq!(digest(&a), digest(&a.clone()));
        assert_ne!(digest(&a), digest(&json!({"value": "3/4", "d": 3})));
        assert_eq!(digest(&a).len(), "sha256:".len() + 64);
    }

    #[test]
    fn empty_object_digest() {
        // sha256 of the two bytes "{}".
        assert_eq!(
            digest(&json!({})),
            "sha256:44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a"
        );
    }
}
