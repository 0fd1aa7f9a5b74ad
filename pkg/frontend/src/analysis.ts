/**
 * Turns a dominance report (or a service error) into the text the
 * analysis panel displays. Pure data-to-data so it is testable without
 * a DOM: the panel renderer just writes these strings into elements.
 */

import type { AnalysisReport, ApiError } from "./api.js";

export interface PanelView {
  tone: "info" | "notice" | "error";
  headline: string;
  lines: string[];
}

export function panelFromReport(report: AnalysisReport): PanelView {
  const lines: string[] = [`map: ${report.expr}`, `regime: ${report.regime}`];
  if (report.note) lines.push(report.note);
  if (report.suggested_radius !== null) {
    lines.push(`suggested viewing radius: ${report.suggested_radius}`);
  }
  switch (report.classification) {
    case "EmbeddedMultibrot":
      return {
        tone: "info",
        headline: `expect embedded z^${report.predicted_order} + c`,
        lines,
      };
    case "LaurentPole":
      return {
        tone: "info",
        headline: "pole at the expansion point (Laurent series)",
        lines,
      };
    case "LinearTermBlocks":
      return {
        tone: "notice",
        headline: "linear term blocks the dominance prediction",
        lines,
      };
    case "ConstantOnly":
      return {
        tone: "notice",
        headline: "constant map: nothing to dominate",
        lines,
      };
  }
}

export function panelFromError(error: ApiError): PanelView {
  if (error.status === 422) {
    const what = error.construct ? ` (${error.construct})` : "";
    return {
      tone: "notice",
      headline: "not series-expandable",
      lines: [`${error.error}${what}`],
    };
  }
  const lines = [error.error];
  if (error.offset !== undefined) lines.push(`at offset ${error.offset}`);
  return { tone: "error", headline: "analysis failed", lines };
}
