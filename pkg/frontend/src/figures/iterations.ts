/** Shared schema bits for comparison-run iteration files. */

export const ITERATION_COLUMNS = [
  "iter",
  "variant",
  "accepted",
  "evaluated",
  "loglik",
  "prop_loglik",
  "prop_mean_ess",
  "prop_final_ess",
  "prop_attempts",
  "prop_collapsed",
  "prop_saturated",
] as const;

/** Stable drawing order: lifebelt first, then everything else alphabetically. */
export function variantOrder(names: Iterable<string>): string[] {
  return [...names].sort((a, b) => {
    const aLifebelt = a.startsWith("lbpf") ? 0 : 1;
    const bLifebelt = b.startsWith("lbpf") ? 0 : 1;
    return aLifebelt - bLifebelt || a.localeCompare(b);
  });
}
