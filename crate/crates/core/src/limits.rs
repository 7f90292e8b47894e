//! Resource bounds shared by constructions that may blow up.

use once_cell::sync::Lazy;

/// Default cap on the number of states produced by a subset construction.
pub const DEFAULT_STATE_CAP: usize = 200_000;

/// Environment variable overriding [`DEFAULT_STATE_CAP`].
pub const STATE_CAP_ENV: &str = "AUTOSTRUCT_STATE_CAP";

static STATE_CAP: Lazy<usize> = Lazy::new(|| {
    std::env::var(STATE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_STATE_CAP)
});

/// The determinization cap in effect for this process.
pub fn state_cap() -> usize {
    *STATE_CAP
}
