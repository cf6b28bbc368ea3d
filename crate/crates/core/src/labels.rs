/// Ground-truth class labels, stored as dense ids with their original names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labels {
    ids: Vec<usize>,
    names: Vec<String>,
}

impl Labels {
    /// Assigns ids in order of first appearance.
    pub fn from_names<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Self {
        let mut distinct: Vec<String> = Vec::new();
        let mut index = std::collections::HashMap::new();
        let ids = names
            .into_iter()
            .map(|name| {
                let name = name.as_ref();
                *index.entry(name.to_owned()).or_insert_with(|| {
                    distinct.push(name.to_owned());
                    distinct.len() - 1
                })
            })
            .collect();
        Labels { ids, names: distinct }
    }

    pub fn from_ids(ids: Vec<usize>) -> Self {
        let k = ids.iter().max().map_or(0, |m| m + 1);
        Labels {
            ids,
            names: (0..k).map(|i| i.to_string()).collect(),
        }
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Number of distinct classes.
    pub fn classes(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, item: usize) -> &str {
        &self.names[self.ids[item]]
    }
}
