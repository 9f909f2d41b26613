/** Browser entry point: wire the session form to the app shell. */

import { mountApp } from "./app.js";

const form = document.getElementById("session-form") as HTMLFormElement;
const modeSelect = document.getElementById("mode") as HTMLSelectElement;
const serviceInput = document.getElementById("service-url") as HTMLInputElement;
const configBox = document.getElementById("config-json") as HTMLTextAreaElement;
const formError = document.getElementById("session-error") as HTMLElement;
const root = document.getElementById("app") as HTMLElement;

form.addEventListener("submit", (event) => {
  event.preventDefault();
  formError.textContent = "";
  let config: unknown;
  if (configBox.value.trim()) {
    try {
      config = JSON.parse(configBox.value);
    } catch (error) {
      formError.textContent = `config is not valid JSON: ${String(error)}`;
      return;
    }
  }
  const app = mountApp(root, serviceInput.value || window.location.origin);
  app
    .start(modeSelect.value, config)
    .then(() => form.classList.add("hidden"))
    .catch((error) => {
      formError.textContent = String(error);
    });
});
