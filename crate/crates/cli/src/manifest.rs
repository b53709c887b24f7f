use serde::{Deserialize, Serialize};

/// Parameters of one invocation, written verbatim at the top of every
/// output so a run can be reproduced from its output alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub n: Option<usize>,
    pub count: Option<usize>,
    pub seed: u64,
    pub model: Option<String>,
    pub format: String,
    pub threads: usize,
    pub output: Option<String>,
}
