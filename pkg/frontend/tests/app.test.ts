import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { mountConsole } from "../src/app.js";
import type { AnswerEnvelope } from "../src/types.js";

import contradiction from "./fixtures/contradiction.json";
import mixed from "./fixtures/mixed.json";

const mixedEnvelope = mixed as AnswerEnvelope;
const contradictionEnvelope = contradiction as AnswerEnvelope;

function page(): void {
  document.body.innerHTML = `
    <form id="question-form">
      <input id="question-input" type="text" />
      <select id="domain-select"><option value="">auto</option></select>
      <button id="question-submit" type="submit" disabled>Ask</button>
      <button id="toggle-explanation" type="button" hidden>Show explanation</button>
    </form>
    <section id="results"></section>`;
}

function jsonResponse(body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status: 200,
    headers: { "Content-Type": "application/json" },
  });
}

type FetchStub = ReturnType<typeof vi.fn<typeof fetch>>;

function stubFetch(perPath: Record<string, unknown>): FetchStub {
  const stub = vi.fn<typeof fetch>(async (input: RequestInfo | URL) => {
    const url = String(input);
    for (const [path, body] of Object.entries(perPath)) {
      if (url.endsWith(path)) {
        return jsonResponse(body);
      }
    }
    return new Response("{}", { status: 404 });
  });
  vi.stubGlobal("fetch", stub);
  return stub;
}

async function settle(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
  await new Promise((resolve) => setTimeout(resolve, 0));
}

beforeEach(() => {
  page();
});

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("console flow", () => {
  it("submits the question and renders the fixture envelope in order", async () => {
    stubFetch({ "/ask": mixedEnvelope, "/domains": { domains: ["cars"] } });
    const app = mountConsole(document);
    const input = document.getElementById("question-input") as HTMLInputElement;
    input.value = "blue automatic honda accord";
    await app.submitQuestion(input.value);
    const ids = Array.from(document.querySelectorAll("tbody tr")).map(
      (row) => row.getAttribute("data-record-id"),
    );
    expect(ids).toEqual(mixedEnvelope.answers.map((a) => a.record_id));
    const kinds = Array.from(document.querySelectorAll("tbody tr .badge")).map(
      (el) => el.textContent,
    );
    expect(kinds).toEqual(mixedEnvelope.answers.map((a) => a.kind));
  });

  it("shows the no-results banner for a contradictory question", async () => {
    stubFetch({ "/ask": contradictionEnvelope, "/domains": { domains: ["cars"] } });
    const app = mountConsole(document);
    await app.submitQuestion("Any car priced above $9000 and below $2000");
    const banner = document.querySelector("#results .banner");
    expect(banner?.textContent).toBe("search retrieved no results");
    expect(document.querySelector("#results table")).toBeNull();
  });

  it("disables submit while the input is empty", async () => {
    stubFetch({ "/domains": { domains: ["cars"] } });
    mountConsole(document);
    const input = document.getElementById("question-input") as HTMLInputElement;
    const submit = document.getElementById("question-submit") as HTMLButtonElement;
    expect(submit.disabled).toBe(true);
    input.value = "red honda";
    input.dispatchEvent(new Event("input"));
    expect(submit.disabled).toBe(false);
    input.value = "   ";
    input.dispatchEvent(new Event("input"));
    expect(submit.disabled).toBe(true);
  });

  it("toggles between answers and the explanation panel", async () => {
    stubFetch({ "/ask": mixedEnvelope, "/domains": { domains: ["cars"] } });
    const app = mountConsole(document);
    await app.submitQuestion("blue automatic honda accord");
    const toggle = document.getElementById("toggle-explanation") as HTMLButtonElement;
    expect(toggle.hidden).toBe(false);
    toggle.click();
    expect(document.querySelectorAll("#results .chip").length).toBe(mixedEnvelope.tags.length);
    expect(toggle.textContent).toBe("Show answers");
    toggle.click();
    expect(document.querySelector("#results table")).not.toBeNull();
  });

  it("keeps the explanation toggle hidden until an envelope exists", async () => {
    stubFetch({ "/domains": { domains: ["cars"] } });
    mountConsole(document);
    await settle();
    const toggle = document.getElementById("toggle-explanation") as HTMLButtonElement;
    expect(toggle.hidden).toBe(true);
  });

  it("surfaces service errors inline", async () => {
    const stub = vi.fn<typeof fetch>(async (input: RequestInfo | URL) => {
      if (String(input).endsWith("/ask")) {
        return new Response(JSON.stringify({ detail: "no conditions extracted" }), {
          status: 400,
        });
      }
      return jsonResponse({ domains: [] });
    });
    vi.stubGlobal("fetch", stub);
    const app = mountConsole(document);
    await app.submitQuestion("???");
    expect(document.querySelector(".banner-error")?.textContent).toBe(
      "no conditions extracted",
    );
  });

  it("aborts the pending request when a new question is submitted", async () => {
    const signals: AbortSignal[] = [];
    const stub = vi.fn<typeof fetch>(
      (input: RequestInfo | URL, init?: RequestInit) =>
        new Promise<Response>((resolve, reject) => {
          if (String(input).endsWith("/domains")) {
            resolve(jsonResponse({ domains: [] }));
            return;
          }
          const signal = init?.signal as AbortSignal;
          signals.push(signal);
          signal.addEventListener("abort", () =>
            reject(new DOMException("aborted", "AbortError")),
          );
          if (signals.length === 2) {
            resolve(jsonResponse(mixedEnvelope));
          }
        }),
    );
    vi.stubGlobal("fetch", stub);
    const app = mountConsole(document);
    const first = app.submitQuestion("first question");
    const second = app.submitQuestion("second question");
    await Promise.all([first, second]);
    expect(signals.length).toBe(2);
    expect(signals[0].aborted).toBe(true);
    expect(signals[1].aborted).toBe(false);
    // the superseded request must not clobber the newer result
    expect(document.querySelectorAll("tbody tr").length).toBe(mixedEnvelope.answers.length);
  });
});
