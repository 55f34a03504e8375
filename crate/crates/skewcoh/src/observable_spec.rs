//! Observable mini-grammar: `pauli:n=x,y,z`, `diag:k1,...,kd`, or a path to
//! a matrix JSON file.

use std::path::Path;

use skewcoh_core::state::Observable;

use crate::error::CliError;
use crate::formats::load_observable;

/// The parsed observable and a description of where it came from.
#[derive(Clone, Debug)]
pub struct ObservableSource {
    pub observable: Observable,
    pub spec: String,
    /// SHA-256 of the file when the spec named one.
    pub sha256: Option<String>,
}

fn numbers(flag: &str, list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::argument(flag, format!("'{s}' is not a finite number")))
        })
        .collect()
}

pub fn parse_observable(spec: &str) -> Result<ObservableSource, CliError> {
    const FLAG: &str = "--observable";
    let observable = if let Some(rest) = spec.strip_prefix("pauli:") {
        let list = rest
            .strip_prefix("n=")
            .ok_or_else(|| CliError::argument(FLAG, "pauli spec must read pauli:n=x,y,z"))?;
        let n = numbers(FLAG, list)?;
        let n: [f64; 3] = n.try_into().map_err(|v: Vec<f64>| {
            CliError::argument(
                FLAG,
                format!("pauli direction needs 3 components, got {}", v.len()),
            )
        })?;
        if n.iter().all(|&x| x == 0.0) {
            return Err(CliError::argument(FLAG, "pauli direction is zero"));
        }
        Observable::pauli(n)
    } else if let Some(rest) = spec.strip_prefix("diag:") {
        let k = numbers(FLAG, rest)?;
        if k.len() < 2 {
            return Err(CliError::argument(
                FLAG,
                "diag spec needs at least 2 entries",
            ));
        }
        Observable::diagonal(&k)
    } else {
        let loaded = load_observable(Path::new(spec))?;
        return Ok(ObservableSource {
            observable: loaded.value,
            spec: spec.to_string(),
            sha256: Some(loaded.sha256),
        });
    };
    Ok(ObservableSource {
        observable,
        spec: spec.to_string(),
        sha256: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        let z = parse_observable("pauli:n=0,0,1").unwrap();
        assert_eq!(z.observable.eigenvalues(), &[-1.0, 1.0]);
        let d = parse_observable("diag:0, 1,2.5").unwrap();
        assert_eq!(d.observable.dim(), 3);
        assert!(parse_observable("pauli:n=1,0").is_err());
        assert!(parse_observable("pauli:0,0,1").is_err());
        assert!(parse_observable("diag:1,x").is_err());
        assert!(parse_observable("diag:1").is_err());
        assert!(parse_observable("/no/such/file.json").is_err());
    }
}
