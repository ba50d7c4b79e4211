use std::fmt;
use std::str::FromStr;

/// Relay power-allocation / access scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// NOMA with fixed δ, perfect SIC.
    Fpa,
    /// NOMA with fixed δ and residual interference after SIC (user 1 only).
    FpaIsic,
    /// NOMA with δ set per channel state so the weak user sits exactly at its threshold.
    Dpa,
    /// Orthogonal baseline: two half-length relay sub-slots. Monte Carlo only.
    Oma,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Fpa, Scheme::FpaIsic, Scheme::Dpa, Scheme::Oma];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Fpa => "FPA",
            Scheme::FpaIsic => "FPA_ISIC",
            Scheme::Dpa => "DPA",
            Scheme::Oma => "OMA",
        }
    }

    /// Users this scheme reports. Residual SIC only affects the strong user.
    pub fn users(self) -> &'static [u8] {
        match self {
            Scheme::FpaIsic => &[1],
            _ => &[1, 2],
        }
    }

    pub fn has_closed_form(self) -> bool {
        self != Scheme::Oma
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|sch| sch.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown scheme `{s}` (expected FPA, FPA_ISIC, DPA or OMA)"))
    }
}
