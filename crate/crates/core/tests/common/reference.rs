//! Reference conditional waits, rows in `CASES` order, columns m = 1..4.

#![allow(dead_code, clippy::approx_constant)]

pub const CASES: [[u32; 4]; 9] = [
    [1, 1, 1, 1],
    [3, 3, 3, 3],
    [6, 6, 6, 6],
    [1, 1, 3, 3],
    [1, 1, 6, 6],
    [3, 3, 1, 1],
    [6, 6, 1, 1],
    [3, 6, 3, 6],
    [6, 3, 6, 3],
];

pub type Grid = [[f64; 4]; 9];

/// One parameter setting: arrival rate 1 per class, service rate `mu[s]` at
/// station `s` for both classes.
pub struct Setting {
    pub name: &'static str,
    pub mu: [f64; 2],
    pub analytic: Grid,
    pub sim: Grid,
    pub det: Grid,
    pub steady_w: f64,
}

pub const SYM_070: Setting = Setting {
    name: "rho=0.70",
    mu: [2.86, 2.86],
    analytic: [
        [1.60, 1.76, 2.81, 2.91],
        [3.07, 4.14, 6.13, 5.76],
        [5.01, 7.31, 11.37, 10.42],
        [2.20, 3.73, 3.46, 4.11],
        [2.94, 6.04, 4.11, 6.18],
        [2.37, 2.47, 4.73, 4.79],
        [3.54, 3.64, 7.58, 7.39],
        [4.05, 6.21, 8.93, 8.74],
        [4.79, 5.81, 7.38, 7.43],
    ],
    sim: [
        [1.48, 1.66, 2.93, 2.98],
        [3.27, 4.02, 6.26, 6.21],
        [5.36, 7.70, 11.53, 11.18],
        [2.19, 3.44, 3.74, 4.21],
        [2.91, 6.42, 4.36, 6.77],
        [2.40, 2.49, 5.21, 5.21],
        [3.65, 3.69, 8.22, 8.19],
        [4.46, 6.78, 9.78, 9.44],
        [4.96, 5.79, 7.71, 7.96],
    ],
    det: [
        [1.05, 1.40, 1.75, 1.75],
        [2.45, 3.50, 5.60, 4.90],
        [4.55, 6.65, 11.53, 9.45],
        [1.75, 3.50, 1.75, 3.50],
        [2.80, 5.95, 2.80, 5.95],
        [1.75, 2.10, 3.50, 3.50],
        [2.80, 3.15, 5.95, 5.95],
        [2.45, 8.40, 8.75, 8.40],
        [4.55, 5.60, 4.55, 7.00],
    ],
    steady_w: 2.33,
};

pub const SYM_090: Setting = Setting {
    name: "rho=0.90",
    mu: [2.22, 2.22],
    analytic: [
        [2.03, 2.32, 3.96, 4.06],
        [3.90, 5.30, 8.73, 7.97],
        [6.60, 9.40, 16.07, 15.26],
        [2.85, 4.94, 4.89, 5.67],
        [3.80, 8.17, 5.79, 8.55],
        [3.04, 3.18, 6.90, 6.78],
        [4.56, 4.69, 10.61, 10.61],
        [5.57, 8.50, 13.61, 12.66],
        [6.36, 7.47, 10.37, 10.03],
    ],
    sim: [
        [1.94, 2.19, 4.15, 4.21],
        [4.22, 5.25, 8.89, 8.74],
        [7.08, 10.06, 17.02, 15.96],
        [2.83, 4.65, 5.36, 5.96],
        [3.82, 8.80, 6.28, 9.39],
        [3.10, 3.23, 7.36, 7.32],
        [4.62, 4.68, 11.68, 11.62],
        [5.95, 9.32, 14.42, 13.75],
        [6.40, 7.42, 10.95, 11.04],
    ],
    det: [
        [1.35, 1.80, 2.25, 2.25],
        [3.15, 4.50, 8.10, 6.30],
        [5.85, 8.55, 17.11, 13.06],
        [2.25, 4.50, 2.25, 4.50],
        [3.60, 8.55, 3.60, 8.55],
        [2.25, 2.70, 4.50, 4.50],
        [3.60, 4.05, 8.55, 8.55],
        [3.15, 12.16, 13.06, 12.16],
        [5.85, 7.20, 5.85, 9.00],
    ],
    steady_w: 8.32,
};

pub const SLOW_FIRST: Setting = Setting {
    name: "mu=(2.22, 2.86)",
    mu: [2.22, 2.86],
    analytic: [
        [1.74, 1.82, 3.25, 3.34],
        [3.26, 3.98, 6.59, 6.35],
        [5.40, 7.06, 11.67, 11.04],
        [2.37, 3.48, 4.01, 4.35],
        [3.08, 6.31, 4.65, 6.45],
        [2.59, 2.68, 5.68, 5.67],
        [4.00, 4.10, 9.27, 9.48],
        [4.14, 5.53, 9.68, 9.68],
        [5.04, 5.78, 8.38, 8.02],
    ],
    sim: [
        [1.66, 1.74, 3.49, 3.51],
        [3.24, 3.83, 6.96, 6.93],
        [5.84, 6.99, 12.41, 11.95],
        [2.20, 3.23, 4.17, 4.46],
        [2.98, 6.07, 5.12, 6.72],
        [2.66, 2.68, 6.24, 6.23],
        [4.09, 4.13, 10.28, 10.27],
        [4.31, 5.67, 10.68, 10.39],
        [5.16, 5.70, 8.70, 8.67],
    ],
    det: [
        [1.40, 1.40, 1.75, 1.75],
        [2.45, 3.50, 4.90, 4.90],
        [4.55, 6.65, 10.15, 10.15],
        [1.75, 2.80, 1.75, 3.15],
        [2.80, 5.95, 2.80, 5.95],
        [2.15, 2.15, 3.95, 3.95],
        [3.50, 3.50, 8.00, 8.00],
        [2.45, 4.55, 8.05, 8.05],
        [4.55, 5.60, 7.00, 7.00],
    ],
    steady_w: 5.32,
};

pub const FAST_FIRST: Setting = Setting {
    name: "mu=(2.86, 2.22)",
    mu: [2.86, 2.22],
    analytic: [
        [2.00, 2.40, 3.46, 3.65],
        [3.69, 5.64, 7.65, 7.67],
        [6.11, 10.96, 14.42, 14.22],
        [2.66, 4.95, 4.34, 5.45],
        [3.69, 8.65, 4.65, 8.79],
        [2.87, 3.09, 6.03, 5.92],
        [4.23, 4.38, 9.49, 9.34],
        [4.89, 9.87, 12.82, 12.46],
        [5.98, 7.65, 9.00, 9.84],
    ],
    sim: [
        [1.89, 2.22, 3.80, 3.86],
        [3.92, 5.78, 8.40, 8.43],
        [6.19, 11.45, 15.46, 15.64],
        [2.64, 5.13, 4.63, 5.92],
        [3.69, 9.42, 5.04, 9.66],
        [2.92, 3.05, 6.62, 6.52],
        [4.34, 4.45, 10.32, 10.21],
        [5.37, 10.84, 13.91, 13.33],
        [5.96, 7.72, 9.67, 10.62],
    ],
    det: [
        [1.35, 1.80, 2.25, 2.25],
        [3.15, 4.50, 8.10, 7.20],
        [5.85, 8.55, 14.11, 14.86],
        [2.25, 4.50, 2.25, 4.50],
        [3.60, 8.55, 3.60, 8.55],
        [2.25, 2.70, 4.50, 4.50],
        [3.60, 4.05, 7.65, 7.65],
        [3.15, 10.16, 13.03, 12.16],
        [5.85, 7.20, 5.85, 9.00],
    ],
    steady_w: 5.32,
};

pub const SETTINGS: [&Setting; 4] = [&SYM_070, &SYM_090, &SLOW_FIRST, &FAST_FIRST];
