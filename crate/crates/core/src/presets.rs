//! Reference numerical values behind the `benchmark4` preset.

pub mod benchmark4 {
    use nalgebra::{DMatrix, DVector};

    pub const N: usize = 4;

    #[rustfmt::skip]
    const A: [f64; 16] = [
        -2.7527, -0.6944, -2.8952, -0.7989,
         1.2008, -4.3397, -1.7097, -0.6025,
        -0.2198, -1.0665, -5.1494,  0.3043,
        -2.8886,  1.922,   2.7361, -3.8897,
    ];

    #[rustfmt::skip]
    const UPSILON: [f64; 16] = [
         6.095,   0.6234,  0.1468, -0.9387,
         0.6234,  6.4595, -1.0145,  1.0203,
         0.1468, -1.0145,  7.0719,  0.7042,
        -0.9387,  1.0203,  0.7042,  4.5038,
    ];

    const UPSILON_LIN: [f64; 4] = [0.0201, 1.4908, 1.2373, 1.8092];

    pub const R: f64 = -0.1504;

    #[rustfmt::skip]
    const Q: [f64; 16] = [
         3.994,  -1.1602, -0.1978, -0.9408,
        -1.1602,  4.0145, -0.3114, -0.8189,
        -0.1978, -0.3114,  5.9914, -1.8039,
        -0.9408, -0.8189, -1.8039,  5.3419,
    ];

    #[rustfmt::skip]
    const P_REFERENCE: [f64; 16] = [
         1.3220,  0.3400, -0.3819, -0.9667,
         0.3400,  0.7413, -0.3188, -0.4261,
        -0.3819, -0.3188,  0.6745,  0.1771,
        -0.9667, -0.4261,  0.1771,  1.3186,
    ];

    pub fn a() -> DMatrix<f64> {
        DMatrix::from_row_slice(N, N, &A)
    }

    /// `B = C = D = E = I₄`.
    pub fn identity() -> DMatrix<f64> {
        DMatrix::identity(N, N)
    }

    pub fn upsilon() -> DMatrix<f64> {
        DMatrix::from_row_slice(N, N, &UPSILON)
    }

    pub fn upsilon_lin() -> DVector<f64> {
        DVector::from_row_slice(&UPSILON_LIN)
    }

    pub fn q() -> DMatrix<f64> {
        DMatrix::from_row_slice(N, N, &Q)
    }

    /// Reference `P`, four decimals.
    pub fn p_reference() -> DMatrix<f64> {
        DMatrix::from_row_slice(N, N, &P_REFERENCE)
    }
}
