use serde_json::json;

/// Failure classes with stable process exit codes.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Infeasible { margin: f64 },
    Tolerance(String),
    /// Verification found an outage; the report is still emitted.
    Outage,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Infeasible { .. } => 3,
            CliError::Tolerance(_) => 4,
            CliError::Outage => 5,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Input(m) => json!({ "error": "input", "message": m }),
            CliError::Infeasible { margin } => json!({ "error": "infeasible", "margin": margin }),
            CliError::Tolerance(m) => json!({ "error": "tolerance", "message": m }),
            CliError::Outage => json!({ "error": "outage" }),
        }
    }
}

impl From<robeam::Error> for CliError {
    fn from(e: robeam::Error) -> Self {
        use robeam::Error as E;
        match e {
            E::InfeasibleInstance { margin } => CliError::Infeasible { margin },
            E::ToleranceNotReached { .. } | E::DegenerateRecovery { .. } => CliError::Tolerance(e.to_string()),
            E::Trial { source, .. } => CliError::from(*source),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
