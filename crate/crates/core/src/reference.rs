//! Published reference values for the eight comparison tables, embedded so
//! that regenerated tables can be checked offline.

/// Columns of tables 1 and 2: `(kappa, rho)`.
pub const KAPPA_RHO_COLUMNS: [(f64, f64); 12] = [
    (0.5, 0.2),
    (0.5, 0.4),
    (0.5, 0.6),
    (0.5, 0.8),
    (1.0, 0.2),
    (1.0, 0.4),
    (1.0, 0.6),
    (1.0, 0.8),
    (2.0, 0.2),
    (2.0, 0.4),
    (2.0, 0.6),
    (2.0, 0.8),
];

/// Rows of tables 1 and 2: `Sxx / Syy`.
pub const SPREAD_RATIOS: [f64; 3] = [0.5, 1.0, 2.0];

/// Likelihood slopes, rounded to three decimals.
pub const TABLE1_MLE_SLOPE: [[f64; 12]; 3] = [
    [
        5.396, 2.828, 2.016, 1.632, 3.799, 2.219, 1.750, 1.535, 1.414, 1.414, 1.414, 1.414,
    ],
    [
        2.686, 1.569, 1.237, 1.086, 1.000, 1.000, 1.000, 1.000, 0.372, 0.638, 0.808, 0.921,
    ],
    [
        0.707, 0.707, 0.707, 0.707, 0.263, 0.451, 0.571, 0.651, 0.185, 0.354, 0.496, 0.613,
    ],
];

/// Obliqueness of the likelihood slopes in [`TABLE1_MLE_SLOPE`].
pub const TABLE2_LAMBDA: [[f64; 12]; 3] = [
    [
        0.033, 0.111, 0.197, 0.273, 0.089, 0.223, 0.316, 0.375, 0.500, 0.500, 0.500, 0.500,
    ],
    [
        0.089, 0.223, 0.316, 0.375, 0.500, 0.500, 0.500, 0.500, 0.911, 0.777, 0.684, 0.625,
    ],
    [
        0.500, 0.500, 0.500, 0.500, 0.911, 0.776, 0.684, 0.625, 0.967, 0.889, 0.803, 0.727,
    ],
];

/// Fixed inputs of table 4 (per-observation moments, so `n = 1`).
pub const TABLE4_RHO: f64 = 0.5;
pub const TABLE4_SXX: f64 = 1.0;
pub const TABLE4_SXXXY: f64 = 10.0;
pub const TABLE4_SXYYY: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table4Row {
    pub syy: f64,
    pub ver: f64,
    pub moment: f64,
    pub hor: f64,
    pub kappa_tilde: f64,
    pub mle: f64,
}

const fn t4(syy: f64, ver: f64, moment: f64, hor: f64, kappa_tilde: f64, mle: f64) -> Table4Row {
    Table4Row {
        syy,
        ver,
        moment,
        hor,
        kappa_tilde,
        mle,
    }
}

/// First and last rows sit on the admissible boundaries of `Syy`
/// (`0.13029` and `1.31862`), printed rounded.
pub const TABLE4: [Table4Row; 8] = [
    t4(0.1303, 0.1805, 0.7219, 0.7219, 0.0000, 0.7219),
    t4(0.2000, 0.2236, 0.7222, 0.8944, 0.0558, 0.7222),
    t4(0.4000, 0.3164, 0.7145, 1.2649, 0.3123, 0.7145),
    t4(0.6000, 0.3873, 0.6977, 1.5492, 0.7412, 0.6977),
    t4(0.8000, 0.4472, 0.6734, 1.7889, 1.4850, 0.6734),
    t4(1.0000, 0.5000, 0.6417, 2.0000, 3.0760, 0.6417),
    t4(1.2000, 0.5477, 0.6020, 2.1909, 9.6582, 0.6020),
    t4(1.3186, 0.5742, 0.5742, 2.2966, f64::INFINITY, 0.5741),
];

/// `(label, sigma_tau^2, sigma_delta^2)`; the label reads `tau^2 : delta^2`
/// and the ratio is the error-variance ratio kappa. Ascending in kappa.
pub const TABLE5_RATIOS: [(&str, f64, f64); 9] = [
    ("1:9", 1.0, 9.0),
    ("1:4", 1.0, 4.0),
    ("4:9", 4.0, 9.0),
    ("1:1", 1.0, 1.0),
    ("4:4", 4.0, 4.0),
    ("9:9", 9.0, 9.0),
    ("9:4", 9.0, 4.0),
    ("4:1", 4.0, 1.0),
    ("9:1", 9.0, 1.0),
];

/// Percent bias of the likelihood slope: rows are assumed ratios and
/// columns true ratios, both in [`TABLE5_RATIOS`] order (R = 100).
pub const TABLE5_PERCENT_BIAS: [[f64; 9]; 9] = [
    [
        0.166, 0.502, 2.164, 0.870, 3.663, 7.995, 8.723, 3.592, 9.282,
    ],
    [
        -0.914, -0.012, 0.811, 0.666, 2.807, 6.087, 7.351, 3.067, 8.265,
    ],
    [
        -2.066, -0.564, -0.643, 0.445, 1.878, 3.999, 5.838, 2.496, 7.137,
    ],
    [
        -4.067, -1.541, -3.184, 0.051, 0.218, 0.266, 3.083, 1.467, 5.058,
    ],
    [
        -4.067, -1.541, -3.184, 0.051, 0.218, 0.266, 3.083, 1.467, 5.058,
    ],
    [
        -4.067, -1.541, -3.184, 0.051, 0.218, 0.266, 3.083, 1.467, 5.058,
    ],
    [
        -5.957, -2.495, -5.590, -0.342, -1.417, -3.330, 0.338, 0.437, 2.936,
    ],
    [
        -6.956, -3.016, -6.856, -0.561, -2.310, -5.230, -1.161, -0.136, 1.748,
    ],
    [
        -7.840, -3.489, -7.973, -0.763, -3.119, -6.899, -2.513, -0.663, 0.657,
    ],
];

/// One row of tables 6 to 8. `mse_e3` is the MSE times 1000.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub label: &'static str,
    pub mse_e3: f64,
    pub percent_bias: f64,
    pub lambda: Option<f64>,
    pub theta_deg: Option<f64>,
}

const fn sr(
    label: &'static str,
    mse_e3: f64,
    percent_bias: f64,
    lambda: f64,
    theta_deg: f64,
) -> StudyRow {
    StudyRow {
        label,
        mse_e3,
        percent_bias,
        lambda: Some(lambda),
        theta_deg: Some(theta_deg),
    }
}

const fn ols(mse_e3: f64, mean_abs_percent_bias: f64) -> StudyRow {
    StudyRow {
        label: "OLS*",
        mse_e3,
        percent_bias: mean_abs_percent_bias,
        lambda: None,
        theta_deg: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyTable {
    pub id: u8,
    pub sigma_delta: f64,
    pub sigma_tau: f64,
    pub rows: [StudyRow; 8],
}

impl StudyTable {
    pub fn row(&self, label: &str) -> Option<&StudyRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

/// Exp(10) latent x, true line `y = x`, n = 100, R = 1000.
#[allow(clippy::approx_constant)]
pub const STUDY_TABLES: [StudyTable; 3] = [
    StudyTable {
        id: 6,
        sigma_delta: 2.0,
        sigma_tau: 1.0,
        rows: [
            sr("VER", 2.001, -3.843, 1.000, 46.12),
            ols(1.336, 2.518),
            sr("HOR", 0.670, 1.193, 0.000, 136.12),
            sr("PER", 0.688, -1.396, 0.507, 89.99),
            sr("GM", 0.653, -1.360, 0.500, 90.78),
            sr("MOM", 1.001, -0.830, 0.339, 108.27),
            sr("COPAS", 2.378, -2.410, 0.651, 74.47),
            sr("MD", 0.646, -1.336, 0.497, 91.06),
        ],
    },
    StudyTable {
        id: 7,
        sigma_delta: 3.0,
        sigma_tau: 1.0,
        rows: [
            sr("VER", 8.370, -8.459, 1.000, 47.53),
            ols(4.847, 4.831),
            sr("HOR", 1.324, 1.203, 0.000, 137.53),
            sr("PER", 2.688, -3.954, 0.520, 89.60),
            sr("GM", 2.423, -3.760, 0.500, 92.19),
            sr("MOM", 2.786, -1.807, 0.318, 110.94),
            sr("COPAS", 8.769, -7.347, 0.848, 58.14),
            sr("MD", 2.309, -3.584, 0.490, 93.196),
        ],
    },
    StudyTable {
        id: 8,
        sigma_delta: 4.0,
        sigma_tau: 1.0,
        rows: [
            sr("VER", 22.791, -14.376, 1.000, 49.43),
            ols(12.46, 7.858),
            sr("HOR", 2.134, 1.339, 0.000, 139.43),
            sr("PER", 7.406, -7.480, 0.539, 89.95),
            sr("GM", 6.242, -6.880, 0.500, 94.08),
            sr("MOM", 5.717, -2.813, 0.286, 114.51),
            sr("COPAS", 23.018, -13.848, 0.950, 52.71),
            sr("MD", 5.578, -6.288, 0.480, 96.04),
        ],
    },
];
