/** Typed client for the claim analysis HTTP API.
 *
 * Shapes mirror the service's published response schema; this module is the
 * only place the backend is touched.
 */

export type Label = "SUPPORT" | "REFUTE";
export type Category = "paper" | "news" | "social" | "patent";

export interface VerdictView {
  doc_id: string;
  title: string;
  abstract: string;
  doi: string | null;
  pub_date: string | null;
  rank: number | null;
  label: Label;
  confidence_pct: number | null;
  evidence_sentences: string[];
  highlight_spans: [number, number][];
  rationale: string;
  flags: string[];
}

export interface ClaimView {
  claim_id: string;
  text: string;
  original_text: string;
  refinement_rationale: string;
  flags: string[];
  verdicts: VerdictView[];
}

export interface AnalyzeResponse {
  input_digest: string;
  retrieval_k: number;
  claims: ClaimView[];
  suppressed_nei_count: number;
  flags: string[];
}

export interface ExampleSummary {
  example_id: string;
  title: string;
  source_url: string;
  category: Category;
}

export interface ExampleResponse extends ExampleSummary {
  text: string;
}

export class ApiError extends Error {
  status: number;

  constructor(status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
    this.status = status;
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(path, init);
  } catch (err) {
    throw new ApiError(0, err instanceof Error ? err.message : "network error");
  }
  if (!response.ok) {
    const body = (await response.json().catch(() => ({}))) as { detail?: string };
    throw new ApiError(response.status, body.detail ?? response.statusText);
  }
  return (await response.json()) as T;
}

export function getExamples(): Promise<ExampleSummary[]> {
  return request<ExampleSummary[]>("/examples");
}

export function getExample(exampleId: string): Promise<ExampleResponse> {
  return request<ExampleResponse>(`/examples/${encodeURIComponent(exampleId)}`);
}

export function analyze(text: string, k?: number): Promise<AnalyzeResponse> {
  return request<AnalyzeResponse>("/analyze", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(k === undefined ? { text } : { text, k }),
  });
}
