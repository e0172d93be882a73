use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};

use super::report::SCHEMA;

/// Content hash of (crate version, operation, params, config).
pub fn cache_key(operation: &str, params: &Value, config: &Value) -> String {
    let material = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "schema": SCHEMA,
        "operation": operation,
        "params": params,
        "config": config,
    });
    let digest = Sha256::digest(material.to_string().as_bytes());
    digest.iter().map(|b| format!("{:02x}", b)).collect()
}

#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
}

pub enum Lookup {
    Hit(String),
    Miss,
    Corrupt(String),
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Cache {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{}.json", key))
    }

    pub fn lookup(&self, key: &str) -> Lookup {
        let Ok(text) = fs::read_to_string(self.path(key)) else { return Lookup::Miss };
        match serde_json::from_str::<Value>(&text) {
            Ok(v) if v.get("schema").and_then(Value::as_str) == Some(SCHEMA) => Lookup::Hit(text),
            Ok(_) => Lookup::Corrupt("schema mismatch".into()),
            Err(e) => Lookup::Corrupt(e.to_string()),
        }
    }

    /// Writes through a temporary file and a rename, so readers never see a partial entry.
    pub fn store(&self, key: &str, text: &str) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!(".{}.{}.tmp", key, std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.path(key))
    }

    /// Cached text, or the producer's output stored under `key`.
    pub fn get_or_produce<E>(&self, key: &str, warn: &mut Vec<String>, producer: impl FnOnce() -> std::result::Result<String, E>) -> std::result::Result<String, E> {
        match self.lookup(key) {
            Lookup::Hit(t) => return Ok(t),
            Lookup::Corrupt(why) => warn.push(format!("corrupt cache entry {} ({}); recomputing", key, why)),
            Lookup::Miss => {}
        }
        let text = producer()?;
        if let Err(e) = self.store(key, &text) {
            warn.push(format!("could not write cache entry {}: {}", key, e));
        }
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmpdir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("eulercx-cache-test-{}-{}", tag, std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn key_depends_on_config() {
        let p = serde_json::json!({"level": 11});
        let a = cache_key("cyclo", &p, &serde_json::json!({"prec": 40}));
        let b = cache_key("cyclo", &p, &serde_json::json!({"prec": 41}));
        assert_ne!(a, b);
        assert_eq!(a, cache_key("cyclo", &p, &serde_json::json!({"prec": 40})));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn replay_and_corruption() {
        let c = Cache::new(tmpdir("replay"));
        let text = format!("{{\"schema\":\"{}\",\"x\":1}}\n", SCHEMA);
        let mut warn = Vec::new();
        let mut calls = 0;
        let a: std::result::Result<String, ()> = c.get_or_produce("k", &mut warn, || {
            calls += 1;
            Ok(text.clone())
        });
        let b: std::result::Result<String, ()> = c.get_or_produce("k", &mut warn, || {
            calls += 1;
            Ok(String::new())
        });
        assert_eq!(a.unwrap(), b.unwrap());
        assert_eq!(calls, 1);
        fs::write(c.dir().join("k.json"), "{not json").unwrap();
        let r: std::result::Result<String, ()> = c.get_or_produce("k", &mut warn, || Ok(text.clone()));
        assert_eq!(r.unwrap(), text);
        assert_eq!(warn.len(), 1);
        assert!(matches!(c.lookup("k"), Lookup::Hit(_)));
        let _ = fs::remove_dir_all(c.dir());
    }
}
