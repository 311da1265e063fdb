use std::fmt::Write as _;

pub const HEADER: &str =
    "snr_db,rho,L,regime,s,delta,mu_ln,log_rho_power,ed_asy,ed_mc,ed_mc_stderr,inf_mc,inf_asy,n_samples";

/// Lines written after the header of every CSV.
pub const NOTES: [&str; 2] = [
    "# rho = 10^(snr_db/10); mu_ln and the (ln rho)^log_rho_power factor use natural logarithms",
    "# inf_mc uses the ergodic capacity in bits per complex channel use, without a bandwidth factor",
];

/// One CSV record; `None` fields are written empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Row {
    pub snr_db: f64,
    pub rho: f64,
    pub l: Option<u32>,
    pub regime: Option<&'static str>,
    pub s: Option<u32>,
    pub delta: Option<f64>,
    pub mu_ln: Option<f64>,
    pub log_rho_power: Option<u32>,
    pub ed_asy: Option<f64>,
    pub ed_mc: Option<f64>,
    pub ed_mc_stderr: Option<f64>,
    pub inf_mc: Option<f64>,
    pub inf_asy: Option<f64>,
    pub n_samples: Option<u64>,
}

/// 12 significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn opt_int<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl Row {
    pub fn to_csv(&self) -> String {
        [
            fmt_float(self.snr_db),
            fmt_float(self.rho),
            opt_int(self.l),
            self.regime.unwrap_or("").to_string(),
            opt_int(self.s),
            opt_float(self.delta),
            opt_float(self.mu_ln),
            opt_int(self.log_rho_power),
            opt_float(self.ed_asy),
            opt_float(self.ed_mc),
            opt_float(self.ed_mc_stderr),
            opt_float(self.inf_mc),
            opt_float(self.inf_asy),
            opt_int(self.n_samples),
        ]
        .join(",")
    }
}

/// CSV text under construction, with an optional leading key column.
pub struct Table {
    text: String,
    prefix: bool,
}

impl Table {
    pub fn new() -> Self {
        Self::with_prefix_column(None)
    }

    /// A table whose records start with an extra column `name`.
    pub fn with_prefix_column(name: Option<&str>) -> Self {
        let mut text = String::new();
        if let Some(name) = name {
            text.push_str(name);
            text.push(',');
        }
        text.push_str(HEADER);
        text.push('\n');
        for note in NOTES {
            text.push_str(note);
            text.push('\n');
        }
        Table {
            text,
            prefix: name.is_some(),
        }
    }

    pub fn warn(&mut self, message: &str) {
        let _ = writeln!(self.text, "# warning: {message}");
    }

    pub fn push(&mut self, row: &Row) {
        assert!(!self.prefix, "table expects a key column");
        self.text.push_str(&row.to_csv());
        self.text.push('\n');
    }

    pub fn push_keyed(&mut self, key: &str, row: &Row) {
        assert!(self.prefix, "table has no key column");
        let _ = writeln!(self.text, "{key},{}", row.to_csv());
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

impl Default for Table {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_fields_stay_empty() {
        let row = Row {
            snr_db: 10.0,
            rho: 10.0,
            l: Some(2),
            ..Row::default()
        };
        assert_eq!(row.to_csv(), "1.00000000000e1,1.00000000000e1,2,,,,,,,,,,,");
        assert_eq!(row.to_csv().split(',').count(), HEADER.split(',').count());
    }

    #[test]
    fn floats_have_twelve_significant_digits() {
        assert_eq!(fmt_float(std::f64::consts::PI), "3.14159265359e0");
        assert_eq!(fmt_float(1.0 / 3.0 * 1e-20), "3.33333333333e-21");
    }
}
