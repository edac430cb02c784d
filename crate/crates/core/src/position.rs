use std::fmt;

use serde::{Deserialize, Serialize};

/// Path of child indices from the root of a term; the empty path is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(pub Vec<u32>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, index: u32) -> Self {
        let mut path = self.0.clone();
        path.push(index);
        Position(path)
    }

    /// `prefix ++ self`
    pub fn under(&self, prefix: &[u32]) -> Self {
        let mut path = prefix.to_vec();
        path.extend_from_slice(&self.0);
        Position(path)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for Position {
    fn from(path: Vec<u32>) -> Self {
        Position(path)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}
