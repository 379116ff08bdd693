// One URL pattern
@WebServlet("/ServletURL")
public class MyFirstServlet extends HttpServlet
{
	...
}
