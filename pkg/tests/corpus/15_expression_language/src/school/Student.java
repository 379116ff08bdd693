package school;

import javax.faces.bean.ManagedBean;

@ManagedBean
public class Student {
	private String firstName;
	public String getFirstName() { return firstName; }
}
