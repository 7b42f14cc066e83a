use super::{BnbNw, Ocp, OcpFull, OcpMinCharge, OcpMinUnused, OcpProactive, PlanError, Planner};
use crate::units::Minutes;

/// Knobs shared by the constructors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlannerOptions {
    pub lookahead: usize,
    pub epsilon: Minutes,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions { lookahead: 25, epsilon: 10 }
    }
}

type Constructor = fn(&PlannerOptions) -> Box<dyn Planner>;

/// Planning modes by name.
pub struct PlannerRegistry {
    entries: Vec<(&'static str, Constructor)>,
}

impl PlannerRegistry {
    pub fn empty() -> Self {
        PlannerRegistry { entries: Vec::new() }
    }

    /// `ocp`, `ocp-f`, `ocp-oc`, `ocp-ocs`, `ocp-po` and `bnb-nw`.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register("ocp", |_| Box::new(Ocp));
        r.register("ocp-f", |_| Box::new(OcpFull));
        r.register("ocp-oc", |_| Box::new(OcpMinCharge));
        r.register("ocp-ocs", |_| Box::new(OcpMinUnused));
        r.register("ocp-po", |o| Box::new(OcpProactive { lookahead: o.lookahead, epsilon: o.epsilon }));
        r.register("bnb-nw", |_| Box::new(BnbNw));
        r
    }

    /// Add or replace a mode.
    pub fn register(&mut self, name: &'static str, ctor: Constructor) {
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = ctor,
            None => self.entries.push((name, ctor)),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|(n, _)| *n)
    }

    pub fn create(&self, name: &str, opts: &PlannerOptions) -> Result<Box<dyn Planner>, PlanError> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, ctor)| ctor(opts))
            .ok_or_else(|| PlanError::UnknownMode(name.to_owned(), self.names().collect::<Vec<_>>().join(", ")))
    }
}

impl Default for PlannerRegistry {
    fn default() -> Self {
        Self::standard()
    }
}
