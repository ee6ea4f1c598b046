use qcodes::gf::Field;
use qcodes::laurent::{CodeDefinition, LaurentError, PolyMatrix};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// On-disk form of a translation-invariant code. Rows of `sigma` are the X
/// components then the Z components; columns are generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub p: u64,
    #[serde(rename = "D")]
    pub dim: usize,
    pub q: usize,
    pub sigma: Vec<Vec<String>>,
}

impl CodeFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Input(format!("line {}, column {}: {}", e.line(), e.column(), strip_position(&e.to_string())))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("code file serializes")
    }

    pub fn from_code(code: &CodeDefinition) -> Self {
        let s = code.sigma();
        CodeFile {
            p: code.p() as u64,
            dim: code.nvars(),
            q: code.q(),
            sigma: (0..s.rows()).map(|r| s.row(r).iter().map(|p| p.to_string()).collect()).collect(),
        }
    }

    pub fn to_code(&self) -> Result<CodeDefinition, CliError> {
        CodeDefinition::new(self.to_matrix()?, self.q).map_err(|e| CliError::Input(e.to_string()))
    }

    /// Parses `sigma` without checking isotropy.
    pub fn to_matrix(&self) -> Result<PolyMatrix, CliError> {
        let field = Field::new(self.p).map_err(|e| CliError::Input(format!("field \"p\": {e}")))?;
        if self.sigma.len() != 2 * self.q {
            return Err(CliError::Input(format!(
                "\"sigma\" has {} rows, expected 2q = {}",
                self.sigma.len(),
                2 * self.q
            )));
        }
        let t = self.sigma.first().map_or(0, Vec::len);
        if let Some(r) = self.sigma.iter().position(|row| row.len() != t) {
            return Err(CliError::Input(format!("\"sigma\" row {} has {} entries, expected {t}", r + 1, self.sigma[r].len())));
        }
        PolyMatrix::parse(field, self.dim, &self.sigma).map_err(|e| match e {
            LaurentError::Parse(pe) => CliError::Input(format!("\"sigma\" {pe}")),
            other => CliError::Input(other.to_string()),
        })
    }
}

fn strip_position(msg: &str) -> &str {
    msg.rfind(" at line ").map_or(msg, |i| &msg[..i])
}

pub fn read(path: &std::path::Path) -> Result<CodeFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    CodeFile::from_json(&text)
}
