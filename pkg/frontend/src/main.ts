import { mountConsole } from "./app.js";

document.addEventListener("DOMContentLoaded", () => {
  mountConsole();
});
