#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsdl/errors.hpp"
#include "fsdl/monitors.hpp"

namespace fsdl {

struct DtPolicy {
    enum class Kind { Fixed, Cfl };

    Kind kind = Kind::Cfl;
    double value = 0.9;  // dt for Fixed, safety factor for Cfl
    double cap = 0.0;    // absolute cap on CFL steps; 0 selects the model default

    static DtPolicy fixed(double dt) { return {Kind::Fixed, dt, 0.0}; }
    static DtPolicy cfl(double safety, double cap = 0.0) { return {Kind::Cfl, safety, cap}; }

    void validate() const {
        if (kind == Kind::Fixed && !(value > 0.0)) throw ValidationError(Hypothesis::ParameterRange, "fixed dt must be positive");
        if (kind == Kind::Cfl && !(value > 0.0 && value <= 1.0))
            throw ValidationError(Hypothesis::ParameterRange, "CFL safety factor must lie in (0,1]");
        if (cap < 0.0) throw ValidationError(Hypothesis::ParameterRange, "dt cap must be nonnegative");
    }

    friend bool operator==(const DtPolicy&, const DtPolicy&) = default;
};

/// Snapshots (linearly interpolated in time at the requested instants, the
/// initial state always first) plus one monitor record per accepted step and
/// one for the initial state.
template <class State>
struct Trajectory {
    std::vector<State> snapshots;
    std::vector<MonitorRecord> monitors;
    std::optional<State> final_state;
    std::size_t steps = 0;
    std::string abort_reason;  // empty when the run reached T

    bool completed() const { return abort_reason.empty(); }

    std::vector<double> snapshot_times() const {
        std::vector<double> t;
        for (const auto& s : snapshots) t.push_back(s.t);
        return t;
    }
};

/// `count` equispaced snapshot instants T/count, 2T/count, ..., T.
inline std::vector<double> uniform_snapshots(double T, std::size_t count) {
    std::vector<double> t;
    for (std::size_t k = 1; k <= count; ++k) t.push_back(T * static_cast<double>(k) / static_cast<double>(count));
    return t;
}

/// Shared time loop. step(state, dt) -> State; cfl(state) -> admissible dt
/// before the safety factor; measure(state, dt) -> MonitorRecord.
template <class State, class StepFn, class CflFn, class MeasureFn>
Trajectory<State> integrate(State state, double T, const DtPolicy& policy, std::span<const double> snapshot_times,
                            StepFn&& step, CflFn&& cfl, MeasureFn&& measure_fn) {
    policy.validate();
    if (!(T >= 0.0)) throw ValidationError(Hypothesis::ParameterRange, "final time must be nonnegative");
    std::vector<double> snaps;
    for (double t : snapshot_times) {
        if (t < 0.0 || t > T * (1.0 + 1e-12)) throw ValidationError("snapshot time outside [0, T]");
        if (t > 0.0) snaps.push_back(std::min(t, T));
    }
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());

    Trajectory<State> traj;
    const double t0 = state.t;
    traj.snapshots.push_back(state);
    traj.monitors.push_back(measure_fn(state, 0.0));
    std::size_t next_snap = 0;
    const double end = t0 + T;
    const double dt_floor = 1e-14 * std::max(T, 1.0);

    while (state.t < end) {
        double dt = policy.kind == DtPolicy::Kind::Fixed ? policy.value : policy.value * cfl(state);
        std::optional<State> next;
        for (int attempt = 0; attempt < 32 && !next; ++attempt) {
            double t_next = policy.kind == DtPolicy::Kind::Fixed ? t0 + static_cast<double>(traj.steps + 1) * policy.value
                                                                 : state.t + dt;
            if (t_next >= end - 1e-12 * std::max(T, 1.0)) t_next = end;
            dt = t_next - state.t;
            if (!(dt > dt_floor)) {
                traj.abort_reason = "step size collapsed below " + std::to_string(dt_floor) + " at t = " + std::to_string(state.t);
                traj.final_state = state;
                return traj;
            }
            try {
                next = step(state, dt);
                next->t = t_next;
            } catch (const StepSizeError& e) {
                if (policy.kind == DtPolicy::Kind::Fixed) {
                    traj.abort_reason = std::string("fixed step rejected: ") + e.what();
                    traj.final_state = state;
                    return traj;
                }
                dt = policy.value * e.admissible_dt();
            } catch (const SolverError& e) {
                traj.abort_reason = std::string("solver failure: ") + e.what();
                traj.final_state = state;
                return traj;
            }
        }
        if (!next) {
            traj.abort_reason = "no admissible step found at t = " + std::to_string(state.t);
            traj.final_state = state;
            return traj;
        }
        if (!finite_state(*next)) {
            traj.abort_reason = "non-finite values at t = " + std::to_string(next->t);
            traj.final_state = state;
            return traj;
        }
        while (next_snap < snaps.size() && t0 + snaps[next_snap] <= next->t) {
            const double ts = t0 + snaps[next_snap];
            if (ts == next->t) traj.snapshots.push_back(*next);
            else traj.snapshots.push_back(interpolate(state, *next, ts));
            ++next_snap;
        }
        traj.monitors.push_back(measure_fn(*next, dt));
        state = std::move(*next);
        ++traj.steps;
    }
    traj.final_state = state;
    return traj;
}

}  // namespace fsdl
