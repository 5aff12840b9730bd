/** Single-page app: examples drop-down, guarded input box, analyze flow. */

import {
  analyze,
  ApiError,
  getExample,
  getExamples,
  type AnalyzeResponse,
  type ExampleSummary,
} from "./api.js";
import { renderClaimCard } from "./cards.js";
import { formatCharCount } from "./format.js";

export const MAX_CHARS = 10_000;
export const RECOMMENDED_CHARS = 2_000;

const CATEGORY_TITLES: Record<string, string> = {
  paper: "Papers",
  news: "News",
  social: "Social media",
  patent: "Patents",
};

export interface AppHandle {
  /** Resolves once the example catalog request has settled. */
  examplesReady: Promise<void>;
  /** Submit the current text; same code path as the Analyze button. */
  submit: () => Promise<void>;
}

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

function makeOption(label: string, value: string): HTMLOptionElement {
  const option = document.createElement("option");
  option.textContent = label;
  option.value = value;
  return option;
}

function groupByCategory(examples: ExampleSummary[]): Map<string, ExampleSummary[]> {
  const groups = new Map<string, ExampleSummary[]>();
  for (const example of examples) {
    const bucket = groups.get(example.category) ?? [];
    bucket.push(example);
    groups.set(example.category, bucket);
  }
  return groups;
}

export function initApp(root: HTMLElement): AppHandle {
  root.textContent = "";

  const banner = el("div", "banner");
  banner.hidden = true;
  root.appendChild(banner);

  const form = el("section", "input-panel");
  const select = el("select", "example-select");
  select.appendChild(makeOption("Choose an example…", ""));
  const sourceLink = el("a", "source-link");
  sourceLink.hidden = true;
  sourceLink.target = "_blank";
  sourceLink.rel = "noopener";
  const textarea = el("textarea", "text-input");
  textarea.rows = 8;
  textarea.placeholder = "Paste a paragraph to analyze…";
  const counter = el("div", "char-counter", formatCharCount(0, MAX_CHARS));
  const warning = el("div", "input-warning");
  warning.hidden = true;
  const analyzeButton = el("button", "analyze-button", "Analyze");
  analyzeButton.type = "button";
  const status = el("div", "status");
  status.hidden = true;
  form.append(select, sourceLink, textarea, counter, warning, analyzeButton, status);
  root.appendChild(form);

  const results = el("section", "results");
  root.appendChild(results);

  function showBanner(message: string): void {
    banner.textContent = message;
    banner.hidden = false;
  }

  function setStatus(message: string | null, kind = "error"): void {
    status.textContent = "";
    status.hidden = message === null;
    status.className = `status status-${kind}`;
    if (message !== null) {
      status.appendChild(el("span", "status-message", message));
    }
  }

  function refreshInputState(): void {
    const length = textarea.value.length;
    counter.textContent = formatCharCount(length, MAX_CHARS);
    if (length > MAX_CHARS) {
      warning.hidden = false;
      warning.className = "input-warning input-blocked";
      warning.textContent =
        `Input is ${length - MAX_CHARS} characters over the ${MAX_CHARS.toLocaleString("en-US")}-character limit and cannot be submitted.`;
    } else if (length > RECOMMENDED_CHARS) {
      warning.hidden = false;
      warning.className = "input-warning input-soft";
      warning.textContent =
        `Long input: results are better under ${RECOMMENDED_CHARS.toLocaleString("en-US")} characters.`;
    } else {
      warning.hidden = true;
      warning.textContent = "";
    }
    analyzeButton.disabled = busy || length === 0 || length > MAX_CHARS;
  }

  let busy = false;

  function renderResults(response: AnalyzeResponse): void {
    results.textContent = "";
    if (response.claims.length === 0) {
      results.appendChild(
        el("p", "empty-state", "No check-worthy claims were found in this text."));
      return;
    }
    for (const claim of response.claims) {
      results.appendChild(renderClaimCard(claim));
    }
    if (response.suppressed_nei_count > 0) {
      results.appendChild(el(
        "p", "suppressed-note",
        `${response.suppressed_nei_count} inconclusive pairing(s) were omitted.`));
    }
  }

  async function submit(): Promise<void> {
    if (busy) return;
    const text = textarea.value;
    if (text.length === 0 || text.length > MAX_CHARS) {
      refreshInputState();
      return;
    }
    busy = true;
    analyzeButton.disabled = true;
    analyzeButton.textContent = "Analyzing…";
    setStatus(null);
    try {
      renderResults(await analyze(text));
    } catch (err) {
      if (err instanceof ApiError && (err.status === 502 || err.status === 0)) {
        setStatus(err.status === 502
          ? `The model gateway failed: ${err.message}`
          : `Could not reach the API: ${err.message}`);
        const retry = el("button", "retry-button", "Retry");
        retry.type = "button";
        retry.addEventListener("click", () => void submit());
        status.appendChild(retry);
      } else if (err instanceof ApiError) {
        setStatus(err.message);
      } else {
        setStatus(err instanceof Error ? err.message : String(err));
      }
    } finally {
      busy = false;
      analyzeButton.textContent = "Analyze";
      refreshInputState();
    }
  }

  async function loadExamples(): Promise<void> {
    try {
      const examples = await getExamples();
      for (const [category, entries] of groupByCategory(examples)) {
        const group = document.createElement("optgroup");
        group.label = CATEGORY_TITLES[category] ?? category;
        for (const entry of entries) {
          group.appendChild(makeOption(entry.title, entry.example_id));
        }
        select.appendChild(group);
      }
    } catch {
      showBanner("Example catalog is unavailable; you can still paste text manually.");
      select.disabled = true;
    }
  }

  select.addEventListener("change", () => {
    const exampleId = select.value;
    if (!exampleId) return;
    void getExample(exampleId).then(
      (example) => {
        textarea.value = example.text;
        sourceLink.href = example.source_url;
        sourceLink.textContent = `Source: ${example.title}`;
        sourceLink.hidden = false;
        refreshInputState();
      },
      () => showBanner("Could not load that example."),
    );
  });

  textarea.addEventListener("input", () => refreshInputState());
  analyzeButton.addEventListener("click", () => void submit());

  refreshInputState();
  return { examplesReady: loadExamples(), submit };
}
