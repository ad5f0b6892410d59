//! Flat `dotted.key = value` files.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

/// Parsed key-value pairs; every key must be consumed by the caller.
pub struct FlatMap {
    entries: BTreeMap<String, String>,
}

impl FlatMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{}`", no + 1, raw.trim()))?;
            let key = key.trim();
            if key.is_empty() {
                bail!("line {}: empty key", no + 1);
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                bail!("line {}: duplicate key `{key}`", no + 1);
            }
        }
        Ok(Self { entries })
    }

    pub fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    pub fn get<T: FromStr>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e| anyhow!("{key}: cannot parse `{v}`: {e}")),
        }
    }

    pub fn get_list<T: FromStr>(&mut self, key: &str, default: Vec<T>) -> Result<Vec<T>>
    where
        T::Err: Display,
    {
        match self.take(key) {
            None => Ok(default),
            Some(v) => split_list(&v)
                .map(|item| item.parse().map_err(|e| anyhow!("{key}: cannot parse `{item}`: {e}")))
                .collect(),
        }
    }

    /// Fails on the first key nobody asked for.
    pub fn finish(self) -> Result<()> {
        match self.entries.into_keys().next() {
            Some(k) => Err(anyhow!("{k}: unknown key")),
            None => Ok(()),
        }
    }
}

pub fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Writes `key = value` lines in insertion order.
#[derive(Default)]
pub struct FlatWriter {
    out: String,
}

impl FlatWriter {
    pub fn put(&mut self, key: &str, value: impl Display) {
        self.out.push_str(&format!("{key} = {value}\n"));
    }

    pub fn put_f64(&mut self, key: &str, value: f64) {
        self.put(key, fmt_f64(value));
    }

    pub fn put_list<T>(&mut self, key: &str, values: &[T], f: impl Fn(&T) -> String) {
        let items: Vec<String> = values.iter().map(f).collect();
        self.put(key, items.join(", "));
    }

    pub fn finish(self) -> String {
        self.out
    }
}

/// Shortest representation that parses back to the same value.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim().parse().with_context(|| format!("{key}: `{v}` is not a number"))
}
