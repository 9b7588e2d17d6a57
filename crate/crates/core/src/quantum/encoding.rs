use std::io::Write;

use super::statevector::StateVector;
use crate::{Error, Result};

/// Classical field carried by `state`: `scale * Re(amplitudes)`.
pub fn decode_field(state: &StateVector, scale: f64) -> Vec<f64> {
    state.amplitudes().iter().map(|a| scale * a.re).collect()
}

/// Sum of the element-wise products of two or more equal-length vectors,
/// `sum_i prod_k v_k[i]`.
pub fn multiproduct(vectors: &[&[f64]]) -> Result<f64> {
    if vectors.len() < 2 || vectors[0].is_empty() {
        return Err(Error::TooFewVectors);
    }
    let len = vectors[0].len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != len) {
        return Err(Error::LengthMismatch {
            expected: len,
            got: bad.len(),
        });
    }
    Ok((0..len)
        .map(|i| vectors.iter().map(|v| v[i]).product::<f64>())
        .sum())
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Debug dump as `index,value` CSV.
pub fn write_vector_csv<W: Write>(writer: W, values: &[f64]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["index", "value"])?;
    for (i, v) in values.iter().enumerate() {
        out.write_record([i.to_string(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{build_state, AnsatzConfig};
    use proptest::prelude::*;

    #[test]
    fn dot_and_triple_products() {
        assert_eq!(multiproduct(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap(), 11.0);
        assert_eq!(
            multiproduct(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]).unwrap(),
            63.0
        );
        let v = [0.3, -1.2, 2.5];
        let self_product = multiproduct(&[&v, &v]).unwrap();
        assert!((self_product - norm(&v).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn multiproduct_errors() {
        assert!(matches!(multiproduct(&[&[1.0]]), Err(Error::TooFewVectors)));
        assert!(matches!(
            multiproduct(&[&[1.0, 2.0], &[1.0]]),
            Err(Error::LengthMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn decode_ground_state_and_zero_scale() {
        let cfg = AnsatzConfig::new(2, 2).unwrap();
        let s = build_state(&[0.0; 4], &cfg).unwrap();
        assert_eq!(decode_field(&s, 1.0), vec![1.0, 0.0, 0.0, 0.0]);
        assert!(decode_field(&s, 0.0).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn csv_dump_format() {
        let mut buf = Vec::new();
        write_vector_csv(&mut buf, &[1.5, -2.0]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "index,value\n0,1.5\n1,-2\n"
        );
    }

    proptest! {
        #[test]
        fn multiproduct_is_multilinear(
            v1 in proptest::collection::vec(-2.0f64..2.0, 8),
            w in proptest::collection::vec(-2.0f64..2.0, 8),
            v2 in proptest::collection::vec(-2.0f64..2.0, 8),
            v3 in proptest::collection::vec(-2.0f64..2.0, 8),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let mixed: Vec<f64> = v1.iter().zip(&w).map(|(x, y)| a * x + b * y).collect();
            let lhs = multiproduct(&[&mixed, &v2, &v3]).unwrap();
            let rhs = a * multiproduct(&[&v1, &v2, &v3]).unwrap()
                + b * multiproduct(&[&w, &v2, &v3]).unwrap();
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }
    }
}
