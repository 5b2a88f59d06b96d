/// Resource limits shared by the exact oracle and the enumerative searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest universe the brute-force oracle will enumerate.
    pub oracle_var_cap: usize,
    /// Upper bound on enumerated objects (subsets, search nodes, functions).
    pub enumeration_budget: u64,
}

pub const DEFAULT_ORACLE_VAR_CAP: usize = 30;
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 2_000_000;

impl Default for Limits {
    fn default() -> Self {
        Limits {
            oracle_var_cap: DEFAULT_ORACLE_VAR_CAP,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
        }
    }
}
