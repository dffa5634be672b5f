import { ApiClient } from "./api.js";
import { renderAnswersTable, renderError, renderExplanation } from "./render.js";
import type { AnswerEnvelope, ViewMode } from "./types.js";

export interface ConsoleElements {
  form: HTMLFormElement;
  input: HTMLInputElement;
  submit: HTMLButtonElement;
  domainSelect: HTMLSelectElement;
  results: HTMLElement;
  toggle: HTMLButtonElement;
}

/**
 * The console's whole state: the current question, the last envelope, and
 * which panel is showing. Everything rendered comes from the envelope.
 */
export class ConsoleApp {
  envelope: AnswerEnvelope | null = null;
  view: ViewMode = "answers";

  constructor(
    private readonly el: ConsoleElements,
    private readonly api: ApiClient = new ApiClient(),
  ) {
    el.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitQuestion(el.input.value);
    });
    el.input.addEventListener("input", () => this.syncSubmitState());
    el.toggle.addEventListener("click", () => this.toggleExplanation());
    this.syncSubmitState();
    this.renderView();
  }

  async loadDomains(): Promise<void> {
    try {
      const domains = await this.api.domains();
      this.el.domainSelect.innerHTML =
        `<option value="">auto</option>` +
        domains.map((d) => `<option value="${d}">${d}</option>`).join("");
    } catch {
      // domain forcing is optional; classification still works without it
    }
  }

  syncSubmitState(): void {
    this.el.submit.disabled = this.el.input.value.trim().length === 0;
  }

  async submitQuestion(text: string): Promise<void> {
    const question = text.trim();
    if (!question) {
      return;
    }
    this.el.results.innerHTML = `<p class="empty">Searching…</p>`;
    try {
      const domain = this.el.domainSelect.value || undefined;
      this.envelope = await this.api.ask(question, domain);
      this.view = "answers";
      this.renderView();
    } catch (error) {
      if (error instanceof DOMException && error.name === "AbortError") {
        return; // superseded by a newer submission
      }
      this.envelope = null;
      this.el.results.innerHTML = renderError(
        error instanceof Error ? error.message : "service unreachable",
      );
      this.renderToggle();
    }
  }

  toggleExplanation(): void {
    if (!this.envelope) {
      return;
    }
    this.view = this.view === "answers" ? "explanation" : "answers";
    this.renderView();
  }

  renderView(): void {
    if (!this.envelope) {
      this.renderToggle();
      return;
    }
    this.el.results.innerHTML =
      this.view === "answers"
        ? renderAnswersTable(this.envelope)
        : renderExplanation(this.envelope);
    this.renderToggle();
  }

  private renderToggle(): void {
    this.el.toggle.hidden = this.envelope === null;
    this.el.toggle.textContent =
      this.view === "answers" ? "Show explanation" : "Show answers";
  }
}

export function mountConsole(root: Document = document): ConsoleApp {
  const get = <T extends HTMLElement>(id: string): T => {
    const node = root.getElementById(id);
    if (!node) {
      throw new Error(`missing element #${id}`);
    }
    return node as T;
  };
  const app = new ConsoleApp({
    form: get<HTMLFormElement>("question-form"),
    input: get<HTMLInputElement>("question-input"),
    submit: get<HTMLButtonElement>("question-submit"),
    domainSelect: get<HTMLSelectElement>("domain-select"),
    results: get<HTMLElement>("results"),
    toggle: get<HTMLButtonElement>("toggle-explanation"),
  });
  void app.loadDomains();
  return app;
}
