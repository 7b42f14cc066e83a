use super::{
    plan_proactive, plan_with, select_min_charge_time, unused_charging_potential, Plan, PlanContext, PlanError,
    Planner, Predictor,
};
use crate::search::{Lcb, RoutingRequest};
use crate::units::Minutes;

/// First optimal path in enumeration order.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ocp;

impl Planner for Ocp {
    fn name(&self) -> &'static str {
        "ocp"
    }

    fn plan(
        &self,
        ctx: &PlanContext<'_>,
        req: &RoutingRequest,
        _: Option<&mut dyn Predictor>,
    ) -> Result<Plan, PlanError> {
        plan_with(ctx, ctx.trt, req, ctx.lcb, |_| 0)
    }
}

/// Vehicles only ever leave a station fully charged.
#[derive(Clone, Copy, Debug, Default)]
pub struct OcpFull;

impl Planner for OcpFull {
    fn name(&self) -> &'static str {
        "ocp-f"
    }

    fn plan(
        &self,
        ctx: &PlanContext<'_>,
        req: &RoutingRequest,
        _: Option<&mut dyn Predictor>,
    ) -> Result<Plan, PlanError> {
        plan_with(ctx, ctx.trt, req, &Lcb::full(), |_| 0)
    }
}

/// Optimal path with the least charging time.
#[derive(Clone, Copy, Debug, Default)]
pub struct OcpMinCharge;

impl Planner for OcpMinCharge {
    fn name(&self) -> &'static str {
        "ocp-oc"
    }

    fn plan(
        &self,
        ctx: &PlanContext<'_>,
        req: &RoutingRequest,
        _: Option<&mut dyn Predictor>,
    ) -> Result<Plan, PlanError> {
        plan_with(ctx, ctx.trt, req, ctx.lcb, select_min_charge_time)
    }
}

/// Optimal path wasting the least station capacity.
#[derive(Clone, Copy, Debug, Default)]
pub struct OcpMinUnused;

impl Planner for OcpMinUnused {
    fn name(&self) -> &'static str {
        "ocp-ocs"
    }

    fn plan(
        &self,
        ctx: &PlanContext<'_>,
        req: &RoutingRequest,
        _: Option<&mut dyn Predictor>,
    ) -> Result<Plan, PlanError> {
        let slot = ctx.trt.slot_minutes();
        plan_with(ctx, ctx.trt, req, ctx.lcb, |paths| {
            (0..paths.len())
                .min_by_key(|&i| (unused_charging_potential(&paths[i], ctx.gtds, req.vehicle_rate_kw, slot), i))
                .unwrap_or(0)
        })
    }
}

/// Optimal path least harmful to the predicted next `lookahead` requests.
#[derive(Clone, Copy, Debug)]
pub struct OcpProactive {
    pub lookahead: usize,
    pub epsilon: Minutes,
}

impl Planner for OcpProactive {
    fn name(&self) -> &'static str {
        "ocp-po"
    }

    fn plan(
        &self,
        ctx: &PlanContext<'_>,
        req: &RoutingRequest,
        predictor: Option<&mut dyn Predictor>,
    ) -> Result<Plan, PlanError> {
        plan_proactive(ctx, req, predictor, self.lookahead, self.epsilon)
    }
}

/// Ignores every reservation, giving the drive-plus-charge floor. Its paths
/// are not committed.
#[derive(Clone, Copy, Debug, Default)]
pub struct BnbNw;

impl Planner for BnbNw {
    fn name(&self) -> &'static str {
        "bnb-nw"
    }

    fn plan(
        &self,
        ctx: &PlanContext<'_>,
        req: &RoutingRequest,
        _: Option<&mut dyn Predictor>,
    ) -> Result<Plan, PlanError> {
        let free = ctx.trt.all_free();
        plan_with(ctx, &free, req, ctx.lcb, |_| 0)
    }

    fn commits(&self) -> bool {
        false
    }
}
