//! Dense vector helpers used by the interior-point driver.
//!
//! Every loop here runs front to back with a single accumulator so that the
//! library and the generated solvers produce bitwise-identical results.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

pub fn norm_inf(a: &[f64]) -> f64 {
    let mut m = 0.0;
    for &v in a {
        let av = v.abs();
        if av > m {
            m = av;
        }
    }
    m
}

pub fn copy(src: &[f64], dst: &mut [f64]) {
    dst.copy_from_slice(src);
}

pub fn neg_copy(src: &[f64], dst: &mut [f64]) {
    for i in 0..src.len() {
        dst[i] = -src[i];
    }
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for i in 0..x.len() {
        y[i] += alpha * x[i];
    }
}

pub fn max2(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

pub fn min2(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}
