/** Canned API payloads used by the snapshot and flow tests. */

import type {
  AnalyzeResponse,
  ClaimView,
  ExampleResponse,
  ExampleSummary,
  VerdictView,
} from "../src/api.js";

export const ABSTRACT_D1 =
  "Cold exposure increases brown fat activity. The effect was strongest in young adults.";
export const ABSTRACT_D2 =
  "We found no link between cold showers and metabolism. Sample size was large.";

export const SUPPORT_VERDICT: VerdictView = {
  doc_id: "d1",
  title: "Brown fat thermogenesis",
  abstract: ABSTRACT_D1,
  doi: "10.1000/d1",
  pub_date: "2021-03-01",
  rank: 1,
  label: "SUPPORT",
  confidence_pct: 88.6,
  evidence_sentences: ["Cold exposure increases brown fat activity."],
  highlight_spans: [[0, 43]],
  rationale: "The abstract states the effect directly.",
  flags: [],
};

export const REFUTE_VERDICT: VerdictView = {
  doc_id: "d2",
  title: "Cold shower metabolism study",
  abstract: ABSTRACT_D2,
  doi: "10.1000/d2",
  pub_date: "2019-07-15",
  rank: 2,
  label: "REFUTE",
  confidence_pct: 61.3,
  evidence_sentences: ["We found no link between cold showers and metabolism."],
  highlight_spans: [[0, 53]],
  rationale: "The study found no such association.",
  flags: [],
};

export const SUPPORT_CLAIM: ClaimView = {
  claim_id: "c1",
  text: "Cold exposure increases brown fat activity.",
  original_text: "cold exposure brown fat claim",
  refinement_rationale: "tightened",
  flags: [],
  verdicts: [SUPPORT_VERDICT],
};

export const CONFLICT_CLAIM: ClaimView = {
  claim_id: "c1",
  text: "Cold exposure increases brown fat activity.",
  original_text: "cold exposure brown fat claim",
  refinement_rationale: "tightened",
  flags: [],
  verdicts: [SUPPORT_VERDICT, REFUTE_VERDICT],
};

export const EMPTY_CLAIM: ClaimView = {
  claim_id: "c2",
  text: "Cold showers improve mood.",
  original_text: "cold showers improve mood",
  refinement_rationale: "",
  flags: [],
  verdicts: [],
};

export function analyzeResponse(
  claims: ClaimView[],
  suppressed = 0,
): AnalyzeResponse {
  return {
    input_digest: "0".repeat(64),
    retrieval_k: 2,
    claims,
    suppressed_nei_count: suppressed,
    flags: [],
  };
}

export const EXAMPLE_SUMMARIES: ExampleSummary[] = [
  {
    example_id: "news-sleep-memory",
    title: "Study links short sleep to weaker recall in adults",
    source_url: "https://example.org/news/sleep-memory-study",
    category: "news",
  },
  {
    example_id: "paper-thermostable-enzyme",
    title: "Engineered cellulase retains activity at 80 degrees",
    source_url: "https://example.org/abstracts/thermostable-cellulase",
    category: "paper",
  },
  {
    example_id: "patent-coating-corrosion",
    title: "Anti-corrosion coating composition for marine steel",
    source_url: "https://example.org/patents/coating-corrosion",
    category: "patent",
  },
];

export const EXAMPLE_FULL: ExampleResponse = {
  ...EXAMPLE_SUMMARIES[0]!,
  text: "A new study of 1,200 adults reports that sleeping less than six hours impairs recall.",
};
