use std::io::Read;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use arr_core::arrangement::{Arrangement, ArrangementJson, Multiarrangement};
use arr_core::catalog;

/// A parsed input together with a JSON description of where it came from.
pub struct Input {
    pub multi: Multiarrangement,
    pub source: Value,
}

impl Input {
    /// `-` reads standard input, `examples:NAME` the catalog, anything else a file.
    pub fn load(spec: &str) -> Result<Input> {
        if let Some(name) = spec.strip_prefix("examples:") {
            let e = catalog::lookup(name)?;
            let source = json!({
                "kind": "example",
                "name": e.name,
                "description": e.description,
                "pivot": e.pivot.as_ref().map(|h| h.format_tuple()),
            });
            return Ok(Input { multi: e.arrangement.simple(), source });
        }
        let text = if spec == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
            s
        } else {
            std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?
        };
        let multi = Multiarrangement::parse(&text).with_context(|| format!("parsing {spec}"))?;
        Ok(Input { multi, source: json!({ "kind": "file", "path": spec }) })
    }

    pub fn simple(&self) -> Result<&Arrangement> {
        if !self.multi.is_simple() {
            bail!("this command needs a simple arrangement (all multiplicities 1)");
        }
        Ok(&self.multi.base)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source,
            "arrangement": ArrangementJson::from_multi(&self.multi),
        })
    }
}
