use alloc::string::String;

/// Errors raised by the numerical routines.
///
/// Divergent integrals, failed conditions and similar negative findings are
/// verdicts carried in the result types, not errors.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} requires {constraint}, got {value}")]
    Domain {
        what: &'static str,
        constraint: &'static str,
        value: f64,
    },
    #[error("invalid parameter `{name}`: {constraint}")]
    InvalidParameter { name: String, constraint: String },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("time step too large: |drift|*h = {excess:.3} at r = {radius:.4}; refine the step")]
    StepTooLarge { radius: f64, excess: f64 },
    #[error("discretisation did not converge: {coarse} vs {fine} ({what})")]
    Resolution { what: &'static str, coarse: f64, fine: f64 },
    #[error("no bracket found for inverse of {what} at level {level}")]
    Range { what: &'static str, level: f64 },
    #[error("schedule not applicable: {threshold_name} requires delta {relation} {threshold}, got {delta}")]
    Inapplicable {
        threshold_name: &'static str,
        relation: &'static str,
        threshold: f64,
        delta: f64,
    },
    #[error("integral diverges beyond r = {radius}")]
    Divergent { radius: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn require_positive_radius(what: &'static str, r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            constraint: "r > 0",
            value: r,
        })
    }
}
