//! Resource limits for the enumeration-heavy operations.
//!
//! Brute-force matrices and search enumerations fail loudly when they would
//! exceed these caps; nothing is ever sampled silently. The environment
//! variable `RESCUE_GAMES_ENUM_CAP`, when set, overrides the two
//! enumeration caps (`matrix_entries` and `expanding_searches`) at once.

pub const ENUM_CAP_ENV: &str = "RESCUE_GAMES_ENUM_CAP";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of payoff-matrix entries the oracle will build.
    pub matrix_entries: u64,
    /// Maximum number of expanding searches to enumerate on a tree.
    pub expanding_searches: u64,
    /// Maximum location count for brute-force best responses (n! orderings).
    pub brute_force_locations: usize,
    /// Maximum location count for exhaustive index verification (2^n subsets).
    pub indexability_locations: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            matrix_entries: 1_000_000,
            expanding_searches: 100_000,
            brute_force_locations: 9,
            indexability_locations: 12,
        }
    }
}

impl Caps {
    /// Default caps with the `RESCUE_GAMES_ENUM_CAP` override applied.
    pub fn from_env() -> Result<Self, String> {
        let mut caps = Caps::default();
        if let Ok(raw) = std::env::var(ENUM_CAP_ENV) {
            let value: u64 = raw
                .trim()
                .parse()
                .map_err(|_| format!("{ENUM_CAP_ENV} must be a positive integer, got {raw:?}"))?;
            if value == 0 {
                return Err(format!("{ENUM_CAP_ENV} must be positive"));
            }
            caps.matrix_entries = value;
            caps.expanding_searches = value;
        }
        Ok(caps)
    }
}
