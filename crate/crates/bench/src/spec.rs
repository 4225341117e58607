//! `name:key=val,key=val` strings naming generators and algorithms.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spec {
    pub name: String,
    params: BTreeMap<String, String>,
}

impl Spec {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, rest) = match text.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (text, None),
        };
        if name.is_empty()
            || !name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(BenchError::usage(format!("bad name in spec '{text}'")));
        }
        let mut params = BTreeMap::new();
        if let Some(rest) = rest {
            for pair in rest.split(',') {
                let Some((k, v)) = pair.split_once('=') else {
                    return Err(BenchError::usage(format!(
                        "expected key=value, got '{pair}' in '{text}'"
                    )));
                };
                let (k, v) = (k.trim(), v.trim());
                if k.is_empty() || v.is_empty() {
                    return Err(BenchError::usage(format!("empty key or value in '{text}'")));
                }
                if params.insert(k.to_string(), v.to_string()).is_some() {
                    return Err(BenchError::usage(format!("key '{k}' repeated in '{text}'")));
                }
            }
        }
        Ok(Self {
            name: name.to_string(),
            params,
        })
    }

    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.params
            .get(key)
            .map(|v| {
                v.parse().map_err(|_| {
                    BenchError::usage(format!("{}: cannot parse {key}='{v}'", self.name))
                })
            })
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| BenchError::usage(format!("{} needs parameter {key}", self.name)))
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    /// Rejects parameters outside `allowed`, so typos do not pass silently.
    pub fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(BenchError::usage(format!(
                "{} does not take parameter '{k}'",
                self.name
            ))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = Spec::parse("halves:n=1000,eps=0.01").unwrap();
        assert_eq!(s.name, "halves");
        assert_eq!(s.require::<usize>("n").unwrap(), 1000);
        assert_eq!(s.get_or("eps", 0.0).unwrap(), 0.01);
        assert_eq!(s.to_string(), "halves:eps=0.01,n=1000");
        assert_eq!(Spec::parse("ksec-seg").unwrap().to_string(), "ksec-seg");
    }

    #[test]
    fn malformed() {
        assert!(Spec::parse("x:n").is_err());
        assert!(Spec::parse("x:n=1,n=2").is_err());
        assert!(Spec::parse(":n=1").is_err());
        assert!(Spec::parse("x:n=abc")
            .unwrap()
            .require::<usize>("n")
            .is_err());
        assert!(Spec::parse("x:m=1").unwrap().only(&["n"]).is_err());
    }
}
