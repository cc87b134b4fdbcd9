import { ApiClient } from "./api.js";
import { Controller } from "./controller.js";
import { render } from "./render.js";

const POLL_MS = 3000;

export function boot(root: HTMLElement, base = ""): Controller {
  const controller = new Controller(new ApiClient(base));
  controller.onChange = () => render(root, controller);
  render(root, controller);
  void controller.refresh();
  setInterval(() => void controller.refresh(), POLL_MS);
  return controller;
}

const mount = document.getElementById("app");
if (mount) boot(mount);
