"""Evaluate one operating point through every route the library offers.

Picks the 2nd-best device out of five under each selection rule and prints
the analytic outage next to the saturation floor and a Monte Carlo estimate,
so disagreements between routes are visible at a glance.
"""

from wpcn_select.analytic import Method, Scheme, SchemeSpec
from wpcn_select.experiments import evaluate_point
from wpcn_select.model import dbm_to_watts, default_params, threshold_x

PT_DBM = -10.0
K = 2
TRIALS = 200_000
SEED = 1


def main() -> None:
    params = default_params(transmit_power=dbm_to_watts(PT_DBM))
    print(f"P_t = {PT_DBM:g} dBm, M = {params.num_devices}, k = {K}, "
          f"x = {threshold_x(params):g}")
    print(f"{'scheme':<8}{'analytic':>14}{'floor':>14}{'monte carlo':>16}{'stderr':>12}")
    for scheme in (Scheme.RS, Scheme.SBS, Scheme.EBS, Scheme.IBS, Scheme.MMS):
        spec = SchemeSpec(scheme, k=K)
        exact = evaluate_point(spec, params, Method.ANALYTIC).value
        floor = evaluate_point(spec, params, Method.HIGH_SNR).value
        mc = evaluate_point(spec, params, Method.MONTE_CARLO,
                            mc_trials=TRIALS, base_seed=SEED)
        print(f"{scheme.value:<8}{exact:>14.6e}{floor:>14.6e}"
              f"{mc.value:>16.6e}{mc.stderr:>12.2e}")


if __name__ == "__main__":
    main()
