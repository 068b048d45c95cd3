use tamefill::ball::BallError;
use tamefill::diagram::DiagramError;
use tamefill::filling::FillingError;
use tamefill::flow::FlowError;
use tamefill::format::ParseError;
use tamefill::presets::PresetError;
use tamefill::rewrite::RewriteError;
use tamefill::tameness::TamenessError;
use tamefill::words::WordError;

/// Why a command did not succeed. The exit code follows the variant.
#[derive(Debug)]
pub enum Failure {
    Check(String),
    Input(String),
    Budget(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    /// One JSON object on one line.
    pub fn report(&self) -> String {
        let (status, message) = match self {
            Failure::Check(m) => ("check_failed", m),
            Failure::Input(m) => ("input_error", m),
            Failure::Budget(m) => ("budget_exceeded", m),
        };
        serde_json::json!({"status": status, "exit_code": self.code(), "message": message})
            .to_string()
    }
}

impl From<RewriteError> for Failure {
    fn from(e: RewriteError) -> Self {
        match e {
            RewriteError::BudgetExceeded(_) | RewriteError::NodeBudgetExceeded(_) => {
                Failure::Budget(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<BallError> for Failure {
    fn from(e: BallError) -> Self {
        match e {
            BallError::Rewrite(r) => r.into(),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<FlowError> for Failure {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::DanglingEdge { .. } => Failure::Input(format!("{e}; try a larger --radius")),
            e => Failure::Check(e.to_string()),
        }
    }
}

impl From<FillingError> for Failure {
    fn from(e: FillingError) -> Self {
        match e {
            FillingError::BallTooSmall { .. } | FillingError::WordOutsideBall(_) => {
                Failure::Input(format!("{e}; try a larger --radius"))
            }
            FillingError::NotIdentity(_) | FillingError::NotFinite => Failure::Input(e.to_string()),
            e => Failure::Check(e.to_string()),
        }
    }
}

impl From<TamenessError> for Failure {
    fn from(e: TamenessError) -> Self {
        match e {
            TamenessError::BudgetExceeded(_) => Failure::Budget(e.to_string()),
            TamenessError::MissingDiagram(f) => f.into(),
            TamenessError::Rewrite(r) => r.into(),
            e => Failure::Input(format!("{e}; try a larger --radius")),
        }
    }
}

impl From<DiagramError> for Failure {
    fn from(e: DiagramError) -> Self {
        Failure::Input(format!("{e}; try a larger --radius"))
    }
}

impl From<WordError> for Failure {
    fn from(e: WordError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<PresetError> for Failure {
    fn from(e: PresetError) -> Self {
        Failure::Input(e.to_string())
    }
}
