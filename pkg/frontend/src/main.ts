/** DOM wiring: one input box, one suggestion panel. */

import { ApiClient } from "./api.js";
import { TypeaheadController, INITIAL_STATE } from "./controller.js";
import { render } from "./render.js";

const SERVICE_URL =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8000";

function mount(): void {
  const input = document.getElementById("query") as HTMLInputElement | null;
  const panel = document.getElementById("suggestions");
  if (!input || !panel) {
    throw new Error("expected #query input and #suggestions panel in the page");
  }
  const api = new ApiClient(SERVICE_URL);
  const controller = new TypeaheadController(api, (state) => {
    panel.innerHTML = render(state);
  });
  panel.innerHTML = render(INITIAL_STATE);
  input.addEventListener("input", () => controller.input(input.value));
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", mount);
} else {
  mount();
}
