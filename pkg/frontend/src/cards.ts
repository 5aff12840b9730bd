/** Expandable claim cards: label color, confidence, evidence, rationale.
 *
 * Rendering is a pure function of the API response — no state beyond the
 * expanded flag, which starts collapsed.
 */

import type { ClaimView, VerdictView } from "./api.js";
import { formatConfidencePct } from "./format.js";
import { renderHighlights, type Warn } from "./highlight.js";

const LABEL_CLASS: Record<VerdictView["label"], string> = {
  SUPPORT: "label-support",
  REFUTE: "label-refute",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderVerdict(verdict: VerdictView, warn?: Warn): HTMLElement {
  const row = el("li", `verdict ${LABEL_CLASS[verdict.label]}`);

  const head = el("div", "verdict-head");
  head.appendChild(el("span", "verdict-label", verdict.label));
  const confidence = formatConfidencePct(verdict.confidence_pct);
  if (confidence !== null) {
    head.appendChild(el("span", "verdict-confidence", confidence));
  }
  if (verdict.pub_date) {
    head.appendChild(el("span", "verdict-date", verdict.pub_date));
  }
  row.appendChild(head);

  const source = el("div", "verdict-source");
  if (verdict.doi) {
    const link = el("a", "doi-link", verdict.title || verdict.doi);
    link.href = `https://doi.org/${verdict.doi}`;
    link.target = "_blank";
    link.rel = "noopener";
    source.appendChild(link);
  } else {
    source.appendChild(el("span", "doc-title", verdict.title || verdict.doc_id));
  }
  row.appendChild(source);

  const abstract = el("p", "verdict-abstract");
  abstract.appendChild(renderHighlights(verdict.abstract, verdict.highlight_spans, warn));
  row.appendChild(abstract);

  if (verdict.rationale) {
    row.appendChild(el("p", "verdict-rationale", verdict.rationale));
  }
  return row;
}

export function renderClaimCard(claim: ClaimView, warn?: Warn): HTMLElement {
  const card = el("article", "claim-card collapsed");
  card.dataset.claimId = claim.claim_id;

  const header = el("header", "claim-header");
  const toggle = el("button", "claim-toggle");
  toggle.type = "button";
  toggle.setAttribute("aria-expanded", "false");
  toggle.appendChild(el("span", "claim-text", claim.text));
  const counts = summarizeLabels(claim.verdicts);
  toggle.appendChild(el("span", "claim-summary", counts));
  header.appendChild(toggle);
  card.appendChild(header);

  const body = el("div", "claim-body");
  body.hidden = true;
  if (claim.verdicts.length === 0) {
    body.appendChild(
      el("p", "empty-state",
         "No sufficiently supported or refuted evidence was found for this claim."),
    );
  } else {
    const list = el("ul", "verdict-list");
    for (const verdict of claim.verdicts) {
      list.appendChild(renderVerdict(verdict, warn));
    }
    body.appendChild(list);
  }
  card.appendChild(body);

  toggle.addEventListener("click", () => {
    const expanded = card.classList.toggle("expanded");
    card.classList.toggle("collapsed", !expanded);
    toggle.setAttribute("aria-expanded", String(expanded));
    body.hidden = !expanded;
  });

  return card;
}

function summarizeLabels(verdicts: VerdictView[]): string {
  const support = verdicts.filter((v) => v.label === "SUPPORT").length;
  const refute = verdicts.filter((v) => v.label === "REFUTE").length;
  if (support === 0 && refute === 0) return "no evidence";
  const parts = [];
  if (support > 0) parts.push(`${support} supporting`);
  if (refute > 0) parts.push(`${refute} refuting`);
  return parts.join(", ");
}
